#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "appsteg/imaging.hpp"
#include "appsteg/payload.hpp"

namespace appsteg {

struct DetectionResult {
  bool verdict = false;
  AppId matched_app = AppId::StegMaster;
  /// Present only when verdict is true. For MobiStego this is the
  /// ciphertext, since the detector does not know the password.
  std::optional<Bytes> recovered_message;
  /// Plaintext password for the apps that embed one (StegMaster, DaVinci).
  std::optional<Bytes> recovered_password;
  std::optional<std::size_t> matched_at_bit;
};

struct DetectOptions {
  /// PocketStego only: additionally require every byte before the terminator
  /// to be printable ASCII (or tab/CR/LF). Off by default.
  bool pocketstego_printable_only = false;
};

class UnsupportedDetectorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The apps with a fixed-location signature, in scan order.
inline constexpr std::array<AppId, 4> kDetectableApps = {AppId::StegMaster, AppId::DaVinci,
                                                         AppId::MobiStego, AppId::PocketStego};

/// Signature test for one app. Throws UnsupportedDetectorError for StegM,
/// whose random path leaves no fixed-location signature. Images that lack the
/// app's carrier channels get verdict false.
DetectionResult detect(AppId app, const PixelImage& img, const SignatureTable& sigs,
                       const DetectOptions& options = {});

/// All four detectors in kDetectableApps order.
std::vector<DetectionResult> scan_all(const PixelImage& img, const SignatureTable& sigs,
                                      const DetectOptions& options = {});

/// Probability that a uniformly random byte stream of `n_bytes` contains a
/// given byte value at least once: 1 - (255/256)^n_bytes.
double random_terminator_hit_probability(std::size_t n_bytes);

}  // namespace appsteg
