#include "appsteg/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <tuple>

#include "appsteg/parallel.hpp"
#include "appsteg/prng.hpp"

namespace appsteg {

SynthSpec smooth_class(int count, int width, int height, Channels channels, std::uint64_t seed) {
  return SynthSpec{count, width, height, channels, 0.0, kSmoothPasses, seed};
}

SynthSpec noisy_class(int count, int width, int height, Channels channels, std::uint64_t seed) {
  return SynthSpec{count, width, height, channels, kNoisySigma, 0, seed};
}

namespace {

void box_blur(std::vector<double>& f, int w, int h) {
  std::vector<double> tmp(f.size());
  // Separable 3-tap mean, edges replicated.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double* row = &f[static_cast<std::size_t>(y) * w];
      tmp[static_cast<std::size_t>(y) * w + x] =
          (row[std::max(x - 1, 0)] + row[x] + row[std::min(x + 1, w - 1)]) / 3.0;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto at = [&](int yy) { return tmp[static_cast<std::size_t>(yy) * w + x]; };
      f[static_cast<std::size_t>(y) * w + x] = (at(std::max(y - 1, 0)) + at(y) + at(std::min(y + 1, h - 1))) / 3.0;
    }
}

}  // namespace

PixelImage synth_cover(const SynthSpec& spec, int index) {
  if (spec.width < 1 || spec.height < 1) throw std::invalid_argument("synthetic size must be positive");
  if (spec.noise_sigma < 0 || spec.smoothing_radius < 0)
    throw std::invalid_argument("noise_sigma and smoothing_radius must be non-negative");
  Prng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(index)));
  PixelImage img(spec.width, spec.height, spec.channels);
  const std::size_t n = img.pixel_count();
  std::vector<double> field(n);
  for (int c = 0; c < img.channel_count(); ++c) {
    for (double& v : field) v = 256.0 * rng.uniform01();
    for (int pass = 0; pass < spec.smoothing_radius; ++pass) box_blur(field, spec.width, spec.height);
    for (std::size_t p = 0; p < n; ++p) {
      double v = field[p];
      if (spec.noise_sigma > 0) v += spec.noise_sigma * rng.normal();
      img.sample(p, c) = static_cast<std::uint8_t>(std::clamp(std::floor(v), 0.0, 255.0));
    }
  }
  return img;
}

std::vector<PixelImage> synth_covers(const SynthSpec& spec) {
  std::vector<PixelImage> out;
  out.reserve(static_cast<std::size_t>(std::max(0, spec.count)));
  for (int i = 0; i < spec.count; ++i) out.push_back(synth_cover(spec, i));
  return out;
}

PixelImage make_cover(AppId app, const PixelImage& input) {
  return app == AppId::DaVinci ? force_alpha(input, 255) : input;
}

std::vector<CoverSource> sources_from_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CoverSource> out;
  for (const auto& f : files) {
    std::string id = std::filesystem::relative(f, dir).replace_extension().generic_string();
    std::replace(id.begin(), id.end(), '/', '_');
    out.push_back({id, [f] { return read_png_file(f); }});
  }
  return out;
}

std::vector<CoverSource> sources_from_images(std::vector<PixelImage> images, const std::string& prefix) {
  std::vector<CoverSource> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "%05zu", i);
    out.push_back({prefix + id, [img = std::move(images[i])] { return img; }});
  }
  return out;
}

std::string rate_label(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", rate);
  return buf;
}

std::uint64_t record_seed(std::uint64_t master_seed, const std::string& source_id, AppId app,
                          double rate) {
  const std::string key = source_id + "|" + std::string(to_string(app)) + "|" + rate_label(rate);
  return mix_seed(master_seed, fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(key.data()), key.size())));
}

Bytes message_for(const Bytes& dictionary, std::uint64_t seed, std::size_t message_bytes) {
  if (message_bytes > dictionary.size())
    throw std::invalid_argument("dictionary holds " + std::to_string(dictionary.size()) +
                                " bytes, message needs " + std::to_string(message_bytes));
  Prng rng(mix_seed(seed, 1));
  const std::size_t offset = rng.uniform(dictionary.size() - message_bytes + 1);
  return Bytes(dictionary.begin() + static_cast<std::ptrdiff_t>(offset),
               dictionary.begin() + static_cast<std::ptrdiff_t>(offset + message_bytes));
}

std::string password_for(const PasswordPolicy& policy, std::uint64_t seed) {
  if (policy.fixed) return *policy.fixed;
  static constexpr char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  Prng rng(mix_seed(seed, 2));
  std::string out;
  for (int i = 0; i < policy.random_length; ++i) out += alphabet[rng.uniform(sizeof(alphabet) - 1)];
  return out;
}

namespace {

struct SourceOutput {
  std::vector<ManifestRecord> records;
  std::vector<std::string> skipped;
};

SourceOutput generate_for_source(const GenConfig& cfg, const CoverSource& source) {
  SourceOutput out;
  const PixelImage input = source.load();
  const auto& root = cfg.output_dir;

  for (AppId app : cfg.apps) {
    const std::string app_name(to_string(app));
    auto skip = [&](const std::string& rate, const std::string& why) {
      out.skipped.push_back(source.id + "/" + app_name + "/" + rate + ": " + why);
    };

    PixelImage cover = make_cover(app, input);
    std::size_t capacity = 0;
    try {
      capacity = capacity_bits(app, cover);
    } catch (const std::invalid_argument& e) {
      skip("-", e.what());
      continue;
    }

    ManifestRecord cover_rec;
    cover_rec.path = app_name + "/covers/" + source.id + ".png";
    cover_rec.role = Role::Cover;
    cover_rec.app = app;
    cover_rec.source_id = source.id;
    cover_rec.seed = record_seed(cfg.master_seed, source.id, app, 0.0);
    cover_rec.width = cover.width();
    cover_rec.height = cover.height();
    write_png_file(root / cover_rec.path, cover);
    out.records.push_back(cover_rec);

    for (double rate : cfg.rates) {
      const std::string label = rate_label(rate);
      const std::uint64_t seed = record_seed(cfg.master_seed, source.id, app, rate);
      const std::string password = password_for(cfg.password, seed);
      const Bytes pwd = to_bytes(password);
      try {
        const RateSpec spec = message_len_for_target(app, capacity, rate, pwd.size(), cfg.sigs);
        const Bytes message = message_for(cfg.dictionary, seed, spec.message_bytes);
        const PayloadBits payload = build_payload(app, message, pwd, cfg.sigs);
        const EmbedResult result = embed(app, cover, payload, pwd, cfg.embed);

        ManifestRecord rec = cover_rec;
        rec.path = app_name + "/stego_" + label + "/" + source.id + ".png";
        rec.role = Role::Stego;
        rec.target_rate = rate;
        rec.achieved_rate = spec.achieved;
        rec.message_bytes = spec.message_bytes;
        rec.password = password;
        rec.change_rate = result.change_rate;
        rec.seed = seed;
        write_png_file(root / rec.path, result.stego);
        out.records.push_back(std::move(rec));
      } catch (const CapacityError& e) {
        skip(label, e.what());
      } catch (const std::invalid_argument& e) {
        skip(label, e.what());
      }
    }
  }
  return out;
}

int app_rank(AppId app) {
  return static_cast<int>(std::find(kAllApps.begin(), kAllApps.end(), app) - kAllApps.begin());
}

}  // namespace

GenReport generate_dataset(const GenConfig& cfg) {
  for (double r : cfg.rates)
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("rates must lie in (0, 1]");
  if (cfg.apps.empty()) throw std::invalid_argument("no apps selected");
  if (cfg.dictionary.empty()) throw std::invalid_argument("empty dictionary");
  std::filesystem::create_directories(cfg.output_dir);

  std::vector<SourceOutput> per_source(cfg.sources.size());
  parallel_for(cfg.sources.size(), cfg.threads,
               [&](std::size_t i) { per_source[i] = generate_for_source(cfg, cfg.sources[i]); });

  GenReport report;
  report.manifest.root = cfg.output_dir;
  for (auto& s : per_source) {
    report.manifest.records.insert(report.manifest.records.end(), s.records.begin(), s.records.end());
    report.skipped.insert(report.skipped.end(), s.skipped.begin(), s.skipped.end());
  }
  auto& recs = report.manifest.records;
  std::sort(recs.begin(), recs.end(), [](const ManifestRecord& a, const ManifestRecord& b) {
    return std::tuple(a.source_id, app_rank(a.app), a.role == Role::Stego, a.target_rate) <
           std::tuple(b.source_id, app_rank(b.app), b.role == Role::Stego, b.target_rate);
  });
  write_manifest(cfg.output_dir / "manifest.jsonl", recs);
  for (const auto& s : report.skipped) std::clog << "skipped " << s << '\n';
  return report;
}

VerifyReport verify_dataset(const DatasetManifest& manifest, const Bytes& dictionary,
                            const SignatureTable& sigs, const EmbedOptions& embed, int threads) {
  std::vector<std::size_t> stegos;
  for (std::size_t i = 0; i < manifest.records.size(); ++i)
    if (manifest.records[i].role == Role::Stego) stegos.push_back(i);

  std::vector<std::string> failure(stegos.size());
  parallel_for(stegos.size(), threads, [&](std::size_t k) {
    const ManifestRecord& r = manifest.records[stegos[k]];
    try {
      const PixelImage img = read_png_file(manifest.file_of(r));
      const Bytes expected = message_for(dictionary, r.seed, r.message_bytes);
      const auto got = extract_message(r.app, img, to_bytes(r.password), sigs, embed);
      if (!got) failure[k] = r.path + ": no payload found";
      else if (got->message != expected) failure[k] = r.path + ": message mismatch";
    } catch (const std::exception& e) {
      failure[k] = r.path + ": " + e.what();
    }
  });

  VerifyReport report;
  report.checked = stegos.size();
  for (auto& f : failure)
    if (!f.empty()) report.failures.push_back(std::move(f));
  return report;
}

}  // namespace appsteg
