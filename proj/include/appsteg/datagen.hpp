#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "appsteg/embedders.hpp"
#include "appsteg/imaging.hpp"
#include "appsteg/manifest.hpp"
#include "appsteg/payload.hpp"

namespace appsteg {

/// Synthetic cover class: clamp(floor(blur^passes(U[0,256)) + N(0, sigma))),
/// where blur is a 3x3 box filter with replicated edges. Each channel is an
/// independent field.
struct SynthSpec {
  int count = 0;
  int width = 0;
  int height = 0;
  Channels channels = Channels::Gray;
  double noise_sigma = 0.0;
  int smoothing_radius = 0;  // box-blur passes
  std::uint64_t seed = 0;
};

inline constexpr int kSmoothPasses = 2;
inline constexpr double kNoisySigma = 8.0;

/// The two source classes: "smooth" (no noise, kSmoothPasses passes) and
/// "noisy" (sigma kNoisySigma, no blur).
SynthSpec smooth_class(int count, int width, int height, Channels channels, std::uint64_t seed);
SynthSpec noisy_class(int count, int width, int height, Channels channels, std::uint64_t seed);

std::vector<PixelImage> synth_covers(const SynthSpec& spec);
PixelImage synth_cover(const SynthSpec& spec, int index);

/// App pre-processing: DaVinci forces alpha to 255; the rest pass through.
PixelImage make_cover(AppId app, const PixelImage& input);

/// Message pool compiled into the library (public-domain prose).
const Bytes& default_dictionary();

struct PasswordPolicy {
  /// Empty: per-record random alphanumeric password of `random_length`.
  std::optional<std::string> fixed;
  int random_length = 8;
};

struct CoverSource {
  std::string id;
  std::function<PixelImage()> load;
};

/// PNG files under `dir` (recursive), sorted by path; ids are relative paths
/// without extension, with '/' replaced by '_'.
std::vector<CoverSource> sources_from_directory(const std::filesystem::path& dir);
/// In-memory images with ids "<prefix><index>" zero-padded to 5 digits.
std::vector<CoverSource> sources_from_images(std::vector<PixelImage> images, const std::string& prefix);

struct GenConfig {
  std::vector<CoverSource> sources;
  std::vector<AppId> apps;
  std::vector<double> rates;
  Bytes dictionary;
  PasswordPolicy password;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir;
  int threads = 1;
  SignatureTable sigs = SignatureTable::defaults();
  EmbedOptions embed;
};

struct GenReport {
  DatasetManifest manifest;
  /// "<source>/<app>/<rate>: reason" for every skipped cover or stego.
  std::vector<std::string> skipped;
};

/// Writes `<out>/<app>/covers/<id>.png`, `<out>/<app>/stego_<rate>/<id>.png`
/// and `<out>/manifest.jsonl`, records sorted by (source_id, app, role, rate).
/// Deterministic for a fixed master_seed regardless of thread count.
GenReport generate_dataset(const GenConfig& cfg);

/// Per-record seed derived from the master seed and the record's identity.
std::uint64_t record_seed(std::uint64_t master_seed, const std::string& source_id, AppId app,
                          double rate);

/// The contiguous dictionary slice a record's seed selects.
Bytes message_for(const Bytes& dictionary, std::uint64_t seed, std::size_t message_bytes);

/// Password a record's seed yields under a policy.
std::string password_for(const PasswordPolicy& policy, std::uint64_t seed);

/// "0.05" style rate label used in directory names.
std::string rate_label(double rate);

struct VerifyReport {
  std::size_t checked = 0;
  std::vector<std::string> failures;
};

/// Re-extracts every stego's message and compares it with the dictionary
/// slice recorded by its seed.
VerifyReport verify_dataset(const DatasetManifest& manifest, const Bytes& dictionary,
                            const SignatureTable& sigs, const EmbedOptions& embed = {},
                            int threads = 1);

}  // namespace appsteg
