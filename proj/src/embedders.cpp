#include "appsteg/embedders.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "appsteg/prng.hpp"

namespace appsteg {

std::size_t EmbedPath::position_of(std::size_t unit, std::size_t n_units) const {
  if (kind != PathKind::BlockLexicographic || band_starts.size() <= 2) return order[unit];
  const std::size_t n = order.size();
  // Units before band k: floor(n_units * band_starts[k] / n).
  for (std::size_t k = 0; k + 1 < band_starts.size(); ++k) {
    const std::size_t next = n_units * band_starts[k + 1] / n;
    if (unit < next) return band_starts[k] + (unit - n_units * band_starts[k] / n);
  }
  throw std::out_of_range("unit beyond path");
}

std::vector<std::uint32_t> EmbedPath::positions(std::size_t n_units) const {
  if (n_units > order.size()) throw std::out_of_range("more units than pixels on path");
  if (kind != PathKind::BlockLexicographic || band_starts.size() <= 2)
    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_units)};
  std::vector<std::uint32_t> out;
  out.reserve(n_units);
  const std::size_t n = order.size();
  for (std::size_t k = 0; k + 1 < band_starts.size(); ++k) {
    const std::size_t share = n_units * band_starts[k + 1] / n - n_units * band_starts[k] / n;
    for (std::size_t i = 0; i < share; ++i)
      out.push_back(static_cast<std::uint32_t>(band_starts[k] + i));
  }
  return out;
}

EmbedPath make_lexicographic_path(int width, int height) {
  EmbedPath path;
  path.kind = PathKind::Lexicographic;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  path.order.resize(n);
  std::iota(path.order.begin(), path.order.end(), 0u);
  path.band_starts = {0, n};
  return path;
}

EmbedPath make_block_path(int width, int height, int blocks) {
  if (blocks < 1 || blocks > height)
    throw std::invalid_argument("block count " + std::to_string(blocks) + " outside [1, " +
                                std::to_string(height) + "]");
  EmbedPath path = make_lexicographic_path(width, height);
  path.kind = PathKind::BlockLexicographic;
  path.band_starts.clear();
  const int rows_per_band = height / blocks;
  for (int k = 0; k < blocks; ++k)
    path.band_starts.push_back(static_cast<std::size_t>(k) * rows_per_band * width);
  path.band_starts.push_back(path.order.size());
  return path;
}

EmbedPath make_seeded_path(int width, int height, std::span<const std::uint8_t> password) {
  Prng prng = prng_from_password(password);
  EmbedPath path = make_lexicographic_path(width, height);
  path.kind = PathKind::SeededPermutation;
  for (std::size_t i = path.order.size() - 1; i > 0; --i)
    std::swap(path.order[i], path.order[prng.uniform(i + 1)]);
  return path;
}

EmbedPath app_path(AppId app, const PixelImage& img, std::span<const std::uint8_t> password,
                   const EmbedOptions& options) {
  switch (app) {
    case AppId::MobiStego:
      return make_block_path(img.width(), img.height(), options.mobistego_blocks);
    case AppId::StegM:
      if (password.empty()) throw std::invalid_argument("StegM path requires a password");
      return make_seeded_path(img.width(), img.height(), password);
    default: return make_lexicographic_path(img.width(), img.height());
  }
}

int bits_per_pixel(AppId app) {
  switch (app) {
    case AppId::StegMaster: return 8;
    case AppId::MobiStego: return 6;
    default: return 1;
  }
}

namespace {

void require_layout(AppId app, const PixelImage& img) {
  const Channels c = img.channels();
  const bool ok = app == AppId::StegM ? (c == Channels::Gray || c == Channels::RGB)
                                      : (c == Channels::RGB || c == Channels::RGBA);
  if (!ok)
    throw std::invalid_argument(std::string(to_string(app)) + " cannot use a " + to_string(c) +
                                " image");
}

// Channel holding the single LSB for the 1-bit LSB apps.
int lsb_channel(AppId app, const PixelImage& img) {
  return app == AppId::StegM && img.channels() == Channels::Gray ? 0 : 2;
}

struct Touch {
  std::size_t visited = 0;
  std::size_t modified = 0;
};

Touch write_unit(AppId app, PixelImage& img, std::size_t pixel, std::span<const std::uint8_t> bits) {
  Touch t;
  auto set = [&](int c, std::uint8_t v) {
    ++t.visited;
    if (img.sample(pixel, c) != v) ++t.modified;
    img.sample(pixel, c) = v;
  };
  switch (app) {
    case AppId::StegMaster: {
      int v = 0;
      for (std::uint8_t b : bits) v = (v << 1) | b;
      set(0, replace_decimal_digit(img.sample(pixel, 0), v / 100));
      set(1, replace_decimal_digit(img.sample(pixel, 1), (v / 10) % 10));
      set(2, replace_decimal_digit(img.sample(pixel, 2), v % 10));
      break;
    }
    case AppId::DaVinci: set(3, bits[0] ? 255 : 254); break;
    case AppId::MobiStego: {
      // Bits b5..b0 go to R(b5 b4), G(b3 b2), B(b1 b0).
      for (std::size_t c = 0; 2 * c < bits.size(); ++c) {
        std::uint8_t v = img.sample(pixel, static_cast<int>(c));
        for (std::size_t k = 2 * c; k < std::min(bits.size(), 2 * c + 2); ++k) {
          const int shift = 1 - static_cast<int>(k % 2);
          v = static_cast<std::uint8_t>((v & ~(1 << shift)) | (bits[k] << shift));
        }
        set(static_cast<int>(c), v);
      }
      break;
    }
    case AppId::PocketStego:
    case AppId::StegM: {
      const int c = lsb_channel(app, img);
      set(c, static_cast<std::uint8_t>((img.sample(pixel, c) & 0xFE) | bits[0]));
      break;
    }
  }
  return t;
}

void read_unit(AppId app, const PixelImage& img, std::size_t pixel, std::size_t n_bits,
               std::vector<std::uint8_t>& out) {
  switch (app) {
    case AppId::StegMaster: {
      const int v = (img.sample(pixel, 0) % 10) * 100 + (img.sample(pixel, 1) % 10) * 10 +
                    img.sample(pixel, 2) % 10;
      if (v > 255)
        throw NotStegoFormatted("digit triple " + std::to_string(v) + " at pixel " +
                                std::to_string(pixel));
      for (int k = 7; k >= 0; --k) out.push_back((v >> k) & 1);
      break;
    }
    case AppId::DaVinci: {
      const std::uint8_t a = img.sample(pixel, 3);
      if (a != 254 && a != 255)
        throw NotStegoFormatted("alpha " + std::to_string(a) + " at pixel " + std::to_string(pixel));
      out.push_back(a == 255 ? 1 : 0);
      break;
    }
    case AppId::MobiStego:
      for (std::size_t k = 0; k < n_bits; ++k)
        out.push_back((img.sample(pixel, static_cast<int>(k / 2)) >> (1 - k % 2)) & 1);
      break;
    case AppId::PocketStego:
    case AppId::StegM: out.push_back(img.sample(pixel, lsb_channel(app, img)) & 1); break;
  }
}

std::size_t units_for(AppId app, std::size_t n_bits) {
  const std::size_t bpp = static_cast<std::size_t>(bits_per_pixel(app));
  return (n_bits + bpp - 1) / bpp;
}

void require_fit(AppId app, const PixelImage& img, std::size_t n_bits) {
  const std::size_t cap = capacity_bits(app, img);
  if (n_bits > cap)
    throw CapacityError(std::string(to_string(app)) + ": " + std::to_string(n_bits) +
                        " payload bits exceed capacity " + std::to_string(cap));
  if (app == AppId::StegMaster && n_bits % 8 != 0)
    throw std::invalid_argument("StegMaster payloads must be whole bytes");
}

}  // namespace

std::size_t capacity_bits(AppId app, const PixelImage& img) {
  require_layout(app, img);
  return img.pixel_count() * static_cast<std::size_t>(bits_per_pixel(app));
}

EmbedResult embed(AppId app, const PixelImage& cover, const PayloadBits& payload,
                  std::span<const std::uint8_t> password, const EmbedOptions& options) {
  require_fit(app, cover, payload.len_bits());
  PixelImage stego = app == AppId::DaVinci ? force_alpha(cover, 255) : cover;
  const EmbedPath path = app_path(app, cover, password, options);

  const std::size_t bpp = static_cast<std::size_t>(bits_per_pixel(app));
  const std::size_t n_units = units_for(app, payload.len_bits());
  const auto positions = path.positions(n_units);
  const auto bits = payload.bits();

  Touch total;
  for (std::size_t u = 0; u < n_units; ++u) {
    const std::size_t from = u * bpp;
    const std::size_t len = std::min(bpp, bits.size() - from);
    const Touch t = write_unit(app, stego, positions[u], bits.subspan(from, len));
    total.visited += t.visited;
    total.modified += t.modified;
  }
  EmbedResult result{std::move(stego), 0.0, total.visited, total.modified};
  if (total.visited > 0)
    result.change_rate = static_cast<double>(total.modified) / static_cast<double>(total.visited);
  return result;
}

PayloadBits extract_bits(AppId app, const PixelImage& img, std::size_t n_bits,
                         std::span<const std::uint8_t> password, const EmbedOptions& options) {
  require_fit(app, img, n_bits);
  if (app == AppId::DaVinci && img.channels() != Channels::RGBA)
    throw NotStegoFormatted("DaVinci stego images carry an alpha channel");
  const EmbedPath path = app_path(app, img, password, options);
  const std::size_t bpp = static_cast<std::size_t>(bits_per_pixel(app));
  const std::size_t n_units = units_for(app, n_bits);
  const auto positions = path.positions(n_units);

  std::vector<std::uint8_t> out;
  out.reserve(n_units * bpp);
  for (std::size_t u = 0; u < n_units; ++u)
    read_unit(app, img, positions[u], std::min(bpp, n_bits - u * bpp), out);
  out.resize(n_bits);
  return PayloadBits(std::move(out));
}

namespace {

// Reads whole units along a fixed-order path until the image ends or a
// value the technique cannot produce shows up.
PayloadBits read_prefix(AppId app, const PixelImage& img, const EmbedPath& path) {
  std::vector<std::uint8_t> out;
  const std::size_t bpp = static_cast<std::size_t>(bits_per_pixel(app));
  out.reserve(path.size() * bpp);
  for (std::size_t u = 0; u < path.size(); ++u) {
    try {
      read_unit(app, img, path.order[u], bpp, out);
    } catch (const NotStegoFormatted&) {
      break;
    }
  }
  return PayloadBits(std::move(out));
}

std::optional<ParsedPayload> extract_mobistego_blocks(const PixelImage& img,
                                                      std::span<const std::uint8_t> password,
                                                      const SignatureTable& sigs,
                                                      const EmbedOptions& options) {
  const EmbedPath path = app_path(AppId::MobiStego, img, password, options);
  const std::size_t cap = capacity_bits(AppId::MobiStego, img);
  const std::size_t head = 8 * sigs.mobistego_start.size();
  const std::size_t tail = 8 * sigs.mobistego_end.size();
  const PayloadBits tail_bits = PayloadBits::from_bytes(sigs.mobistego_end);

  // The unit split depends on the total length, so try each message length
  // and test only the end signature's bits before a full read.
  std::vector<std::uint8_t> scratch;
  for (std::size_t m = 0; head + tail + 8 * m <= cap; ++m) {
    const std::size_t n_bits = head + tail + 8 * m;
    const std::size_t n_units = units_for(AppId::MobiStego, n_bits);
    bool match = true;
    for (std::size_t k = n_bits - tail; k < n_bits && match; ++k) {
      scratch.clear();
      const std::size_t pixel = path.position_of(k / 6, n_units);
      read_unit(AppId::MobiStego, img, pixel, 6, scratch);
      match = scratch[k % 6] == tail_bits[k - (n_bits - tail)];
    }
    if (!match) continue;
    const PayloadBits bits = extract_bits(AppId::MobiStego, img, n_bits, password, options);
    if (auto parsed = parse_payload(AppId::MobiStego, bits, password, sigs)) return parsed;
  }
  return std::nullopt;
}

}  // namespace

std::optional<ParsedPayload> extract_message(AppId app, const PixelImage& img,
                                             std::span<const std::uint8_t> password,
                                             const SignatureTable& sigs,
                                             const EmbedOptions& options) {
  require_layout(app, img);
  switch (app) {
    case AppId::StegMaster:
    case AppId::PocketStego:
      return parse_payload(app, read_prefix(app, img, app_path(app, img, password, options)),
                           password, sigs);
    case AppId::DaVinci:
      if (img.channels() != Channels::RGBA) return std::nullopt;
      return parse_payload(app, read_prefix(app, img, app_path(app, img, password, options)),
                           password, sigs);
    case AppId::MobiStego:
      if (options.mobistego_blocks > 1)
        return extract_mobistego_blocks(img, password, sigs, options);
      return parse_payload(app, read_prefix(app, img, app_path(app, img, password, options)),
                           password, sigs);
    case AppId::StegM: {
      const std::size_t cap = capacity_bits(app, img);
      if (cap < 32) return std::nullopt;
      const std::uint32_t len = extract_bits(app, img, 32, password, options).u32_at(0);
      if (len % 8 != 0 || len > cap - 32) return std::nullopt;
      return parse_payload(app, extract_bits(app, img, 32 + len, password, options), password,
                           sigs);
    }
  }
  return std::nullopt;
}

}  // namespace appsteg
