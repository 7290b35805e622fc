#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "appsteg/imaging.hpp"
#include "appsteg/payload.hpp"

namespace appsteg {

enum class PathKind { Lexicographic, BlockLexicographic, SeededPermutation };

/// Order in which pixels (row-major indices) receive payload units.
///
/// For BlockLexicographic the image rows are cut into `blocks` horizontal
/// bands (the last band takes the remainder) and the payload is split across
/// bands in proportion to their pixel counts, so which pixels are visited
/// depends on how many units are embedded. `position_of` takes that count.
struct EmbedPath {
  PathKind kind = PathKind::Lexicographic;
  std::vector<std::uint32_t> order;
  /// Pixel index at which each band starts, followed by the pixel count.
  /// Always {0, N} for the non-block kinds.
  std::vector<std::size_t> band_starts;

  std::size_t size() const { return order.size(); }
  std::size_t position_of(std::size_t unit, std::size_t n_units) const;
  std::vector<std::uint32_t> positions(std::size_t n_units) const;
};

EmbedPath make_lexicographic_path(int width, int height);
EmbedPath make_block_path(int width, int height, int blocks);
/// Fisher-Yates over 0..N-1: for i = N-1 down to 1, swap order[i] with
/// order[prng.uniform(i + 1)], prng = prng_from_password(password).
EmbedPath make_seeded_path(int width, int height, std::span<const std::uint8_t> password);

struct EmbedOptions {
  /// Horizontal bands in MobiStego's regional path.
  int mobistego_blocks = 1;
};

/// Path the app uses for this image.
EmbedPath app_path(AppId app, const PixelImage& img, std::span<const std::uint8_t> password,
                   const EmbedOptions& options = {});

/// Payload bits carried per visited pixel (8, 1, 6, 1, 1).
int bits_per_pixel(AppId app);

/// Throws std::invalid_argument when the image layout cannot carry the app's
/// payload (StegM: Gray or RGB; all others: RGB or RGBA).
std::size_t capacity_bits(AppId app, const PixelImage& img);

struct EmbedResult {
  PixelImage stego;
  /// Modified carrier samples / visited carrier samples.
  double change_rate = 0.0;
  std::size_t visited_samples = 0;
  std::size_t modified_samples = 0;
};

EmbedResult embed(AppId app, const PixelImage& cover, const PayloadBits& payload,
                  std::span<const std::uint8_t> password, const EmbedOptions& options = {});

/// A visited pixel holds a value the technique can never write (StegMaster
/// digit triple above 255, DaVinci alpha outside {254, 255}).
class NotStegoFormatted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PayloadBits extract_bits(AppId app, const PixelImage& img, std::size_t n_bits,
                         std::span<const std::uint8_t> password, const EmbedOptions& options = {});

/// Recovers the message without knowing its length, reading as far as the
/// app's format requires. nullopt when no well-formed payload is present.
std::optional<ParsedPayload> extract_message(AppId app, const PixelImage& img,
                                             std::span<const std::uint8_t> password,
                                             const SignatureTable& sigs,
                                             const EmbedOptions& options = {});

/// StegMaster digit substitution for one channel: replace the decimal ones
/// digit of `value` with `digit`, stepping down by 10 on overflow.
constexpr std::uint8_t replace_decimal_digit(std::uint8_t value, int digit) {
  int v = value - value % 10 + digit;
  if (v > 255) v -= 10;
  return static_cast<std::uint8_t>(v);
}

}  // namespace appsteg
