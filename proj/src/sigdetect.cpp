#include "appsteg/sigdetect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace appsteg {

namespace {

bool has_rgb(const PixelImage& img) {
  return img.channels() == Channels::RGB || img.channels() == Channels::RGBA;
}

bool ends_with(const Bytes& hay, std::size_t min_start, const Bytes& needle) {
  if (hay.size() < needle.size() || hay.size() - needle.size() < min_start) return false;
  return std::equal(needle.begin(), needle.end(), hay.end() - static_cast<std::ptrdiff_t>(needle.size()));
}

DetectionResult negative(AppId app) {
  DetectionResult r;
  r.matched_app = app;
  return r;
}

DetectionResult detect_stegmaster(const PixelImage& img, const SignatureTable& sigs) {
  Bytes lead = sigs.stegmaster_open1;
  lead.insert(lead.end(), sigs.stegmaster_close1.begin(), sigs.stegmaster_close1.end());

  Bytes bytes;
  std::optional<std::size_t> open2_at;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const int v = (img.sample(p, 0) % 10) * 100 + (img.sample(p, 1) % 10) * 10 + img.sample(p, 2) % 10;
    if (v > 255) break;
    bytes.push_back(static_cast<std::uint8_t>(v));

    if (bytes.size() <= lead.size()) {
      if (bytes.back() != lead[bytes.size() - 1]) break;
      continue;
    }
    if (!open2_at) {
      if (ends_with(bytes, lead.size(), sigs.stegmaster_open2))
        open2_at = bytes.size() - sigs.stegmaster_open2.size();
      continue;
    }
    const std::size_t msg_begin = *open2_at + sigs.stegmaster_open2.size();
    if (ends_with(bytes, msg_begin, sigs.stegmaster_close2)) {
      DetectionResult r;
      r.verdict = true;
      r.matched_app = AppId::StegMaster;
      r.recovered_password = Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(lead.size()),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(*open2_at));
      r.recovered_message =
          Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(msg_begin),
                bytes.end() - static_cast<std::ptrdiff_t>(sigs.stegmaster_close2.size()));
      r.matched_at_bit = 0;
      return r;
    }
  }
  return negative(AppId::StegMaster);
}

// Alpha-plane bit reader; fails on any alpha the embedder cannot write.
class AlphaBits {
 public:
  explicit AlphaBits(const PixelImage& img) : img_(img) {}

  std::size_t size() const { return img_.pixel_count(); }

  std::optional<std::uint64_t> read(std::size_t at, std::size_t n) const {
    if (at + n > size()) return std::nullopt;
    std::uint64_t v = 0;
    for (std::size_t i = at; i < at + n; ++i) {
      const std::uint8_t a = img_.sample(i, 3);
      if (a != 254 && a != 255) return std::nullopt;
      v = (v << 1) | (a == 255 ? 1u : 0u);
    }
    return v;
  }

  std::optional<Bytes> read_bytes(std::size_t at, std::size_t count) const {
    Bytes out;
    for (std::size_t i = 0; i < count; ++i) {
      const auto b = read(at + 8 * i, 8);
      if (!b) return std::nullopt;
      out.push_back(static_cast<std::uint8_t>(*b));
    }
    return out;
  }

 private:
  const PixelImage& img_;
};

DetectionResult detect_davinci(const PixelImage& img, const SignatureTable& sigs) {
  if (img.channels() != Channels::RGBA) return negative(AppId::DaVinci);
  const AlphaBits bits(img);
  const std::size_t sig_bits = 8 * sigs.davinci_sig.size();

  const auto sig_len = bits.read(0, 32);
  if (!sig_len || *sig_len != sig_bits) return negative(AppId::DaVinci);
  const auto sig = bits.read_bytes(32, sigs.davinci_sig.size());
  if (!sig || *sig != sigs.davinci_sig) return negative(AppId::DaVinci);

  const std::size_t pwd_at = 32 + sig_bits;
  const auto pwd_len = bits.read(pwd_at, 32);
  if (!pwd_len || *pwd_len % 8 != 0 || *pwd_len > bits.size()) return negative(AppId::DaVinci);
  const std::size_t msg_at = pwd_at + 32 + *pwd_len;
  const auto msg_len = bits.read(msg_at, 32);
  if (!msg_len || *msg_len % 8 != 0) return negative(AppId::DaVinci);
  // All three segments with their length fields must fit in the image.
  if (96 + sig_bits + *pwd_len + *msg_len > bits.size()) return negative(AppId::DaVinci);

  const auto pwd = bits.read_bytes(pwd_at + 32, *pwd_len / 8);
  const auto msg = bits.read_bytes(msg_at + 32, *msg_len / 8);
  if (!pwd || !msg) return negative(AppId::DaVinci);

  DetectionResult r;
  r.verdict = true;
  r.matched_app = AppId::DaVinci;
  r.recovered_password = *pwd;
  r.recovered_message = *msg;
  r.matched_at_bit = 0;
  return r;
}

DetectionResult detect_mobistego(const PixelImage& img, const SignatureTable& sigs) {
  // Two LSBs of R, G, B per pixel, reassembled into bytes in path order.
  Bytes bytes;
  std::uint32_t acc = 0;
  int nacc = 0;
  std::optional<DetectionResult> hit;
  const std::size_t head = sigs.mobistego_start.size();
  for (std::size_t p = 0; p < img.pixel_count() && !hit; ++p) {
    for (int c = 0; c < 3 && !hit; ++c) {
      acc = (acc << 2) | (img.sample(p, c) & 3u);
      nacc += 2;
      if (nacc < 8) continue;
      nacc -= 8;
      bytes.push_back(static_cast<std::uint8_t>(acc >> nacc));
      acc &= (1u << nacc) - 1;

      if (bytes.size() <= head) {
        if (bytes.back() != sigs.mobistego_start[bytes.size() - 1]) return negative(AppId::MobiStego);
      } else if (ends_with(bytes, head, sigs.mobistego_end)) {
        DetectionResult r;
        r.verdict = true;
        r.matched_app = AppId::MobiStego;
        r.recovered_message =
            Bytes(bytes.begin() + static_cast<std::ptrdiff_t>(head),
                  bytes.end() - static_cast<std::ptrdiff_t>(sigs.mobistego_end.size()));
        r.matched_at_bit = 0;
        hit = std::move(r);
      }
    }
  }
  return hit ? *hit : negative(AppId::MobiStego);
}

bool printable(std::uint8_t b) { return (b >= 0x20 && b < 0x7f) || b == '\t' || b == '\n' || b == '\r'; }

DetectionResult detect_pocketstego(const PixelImage& img, const SignatureTable& sigs,
                                   const DetectOptions& options) {
  Bytes bytes;
  const std::size_t n_bytes = img.pixel_count() / 8;
  for (std::size_t i = 0; i < n_bytes; ++i) {
    std::uint8_t v = 0;
    for (std::size_t k = 0; k < 8; ++k)
      v = static_cast<std::uint8_t>((v << 1) | (img.sample(8 * i + k, 2) & 1));
    if (v == sigs.pocketstego_terminator) {
      DetectionResult r;
      r.verdict = true;
      r.matched_app = AppId::PocketStego;
      r.recovered_message = std::move(bytes);
      r.matched_at_bit = 8 * i;
      return r;
    }
    if (options.pocketstego_printable_only && !printable(v)) break;
    bytes.push_back(v);
  }
  return negative(AppId::PocketStego);
}

}  // namespace

DetectionResult detect(AppId app, const PixelImage& img, const SignatureTable& sigs,
                       const DetectOptions& options) {
  if (app == AppId::StegM)
    throw UnsupportedDetectorError("StegM embeds along a password-seeded path; no signature detector");
  if (!has_rgb(img)) return negative(app);
  switch (app) {
    case AppId::StegMaster: return detect_stegmaster(img, sigs);
    case AppId::DaVinci: return detect_davinci(img, sigs);
    case AppId::MobiStego: return detect_mobistego(img, sigs);
    case AppId::PocketStego: return detect_pocketstego(img, sigs, options);
    case AppId::StegM: break;
  }
  return negative(app);
}

std::vector<DetectionResult> scan_all(const PixelImage& img, const SignatureTable& sigs,
                                      const DetectOptions& options) {
  std::vector<DetectionResult> out;
  for (AppId app : kDetectableApps) out.push_back(detect(app, img, sigs, options));
  return out;
}

double random_terminator_hit_probability(std::size_t n_bytes) {
  return 1.0 - std::pow(255.0 / 256.0, static_cast<double>(n_bytes));
}

}  // namespace appsteg
