// Acceptance run: one PASS/FAIL line per criterion. Optional arguments select
// criteria by label (e.g. `acceptance 1 5a`); default runs all of them.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "appsteg/datagen.hpp"
#include "appsteg/embedders.hpp"
#include "appsteg/evaluate.hpp"
#include "appsteg/feature_io.hpp"
#include "appsteg/features.hpp"
#include "appsteg/sigdetect.hpp"
#include "naive_srm.hpp"
#include "test_util.hpp"

using namespace appsteg;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and sizes.
constexpr double kRates[] = {0.02, 0.05, 0.10, 0.15, 0.20};
constexpr int kSigSourcesPerApp = 40;  // x 5 rates = 200 stegos per app
constexpr int kSigSide = 128;
constexpr double kPocketMinFp = 0.95;
constexpr double kC1Budget = 120.0;
constexpr int kC2Images = 500;
constexpr double kC2Tolerance = 0.02;
constexpr double kC2Budget = 60.0;
constexpr int kC3Cases = 100;
constexpr int kMlPairs = 400;
constexpr int kMlSide = 256;
constexpr int kMlTrain = 200, kMlTest = 200;
constexpr double kC5aMargin = 0.05, kC5aCeiling = 0.30;
constexpr double kC5aBudget = 900.0;
constexpr double kC5bMargin = 0.05;
constexpr int kC5cRepetitions = 5;
constexpr double kNullLo = 0.45, kNullHi = 0.55;
constexpr std::uint64_t kSeed = 20240601;

const SignatureTable kSigs = SignatureTable::defaults();
const int kThreads = std::max(1u, std::thread::hardware_concurrency());

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

fs::path work_root() {
  static testutil::TempDir dir("acceptance");
  return dir.path();
}

// Datasets shared between criteria, generated once on first use.
const DatasetManifest& signature_dataset() {
  static const DatasetManifest m = [] {
    GenConfig cfg;
    cfg.sources = sources_from_images(
        synth_covers(smooth_class(kSigSourcesPerApp, kSigSide, kSigSide, Channels::RGB, mix_seed(kSeed, 1))), "sig");
    cfg.apps.assign(kAllApps.begin(), kAllApps.end());
    cfg.rates.assign(std::begin(kRates), std::end(kRates));
    cfg.dictionary = default_dictionary();
    cfg.master_seed = mix_seed(kSeed, 2);
    cfg.output_dir = work_root() / "sig";
    cfg.threads = kThreads;
    const GenReport rep = generate_dataset(cfg);
    for (const auto& s : rep.skipped) std::cerr << "skipped: " << s << "\n";
    return rep.manifest;
  }();
  return m;
}

DatasetManifest ml_dataset(const std::string& name, const SynthSpec& spec, const std::vector<double>& rates) {
  GenConfig cfg;
  cfg.sources = sources_from_images(synth_covers(spec), name);
  cfg.apps = {AppId::StegM};
  cfg.rates = rates;
  cfg.dictionary = default_dictionary();
  cfg.master_seed = mix_seed(kSeed, 3);
  cfg.output_dir = work_root() / name;
  cfg.threads = kThreads;
  return generate_dataset(cfg).manifest;
}

const DatasetManifest& smooth_ml() {
  static const DatasetManifest m =
      ml_dataset("smooth", smooth_class(kMlPairs, kMlSide, kMlSide, Channels::Gray, mix_seed(kSeed, 4)),
                 {0.02, 0.05, 0.10, 0.20});
  return m;
}

const DatasetManifest& noisy_ml() {
  static const DatasetManifest m =
      ml_dataset("noisy", noisy_class(kMlPairs, kMlSide, kMlSide, Channels::Gray, mix_seed(kSeed, 5)), {0.10});
  return m;
}

const PairsByRate& smooth_pairs() {
  static const PairsByRate p = collect_pairs(smooth_ml(), AppId::StegM, {0.02, 0.05, 0.10, 0.20}, kThreads);
  return p;
}

TrainParams auto_params(std::uint64_t seed) {
  TrainParams p;
  p.seed = seed;
  p.threads = kThreads;
  return p;
}

// 1. Signature detection on a generated dataset.
Outcome criterion1() {
  const auto t0 = Clock::now();
  const DatasetManifest& m = signature_dataset();
  std::map<AppId, std::size_t> own, tp, other, fp;
  std::size_t covers = 0, wrong_recovery = 0;
  for (const auto& r : m.records) {
    const PixelImage img = read_png_file(m.file_of(r));
    covers += r.role == Role::Cover;
    const auto results = scan_all(img, kSigs);
    for (const auto& d : results) {
      const bool is_own = r.role == Role::Stego && r.app == d.matched_app;
      if (is_own) {
        ++own[d.matched_app];
        tp[d.matched_app] += d.verdict;
        if (d.verdict && d.matched_app != AppId::MobiStego &&
            d.recovered_message != message_for(default_dictionary(), r.seed, r.message_bytes))
          ++wrong_recovery;
      } else {
        ++other[d.matched_app];
        fp[d.matched_app] += d.verdict;
      }
    }
  }
  const double secs = seconds_since(t0);
  bool pass = covers >= 200 && wrong_recovery == 0 && secs < kC1Budget;
  std::ostringstream detail;
  detail << covers << " covers;";
  for (AppId a : kDetectableApps) {
    const double fpr = other[a] ? double(fp[a]) / other[a] : 0.0;
    pass = pass && own[a] == 200 && tp[a] == own[a];
    pass = pass && (a == AppId::PocketStego ? fpr >= kPocketMinFp : fp[a] == 0);
    detail << " " << to_string(a) << " TP " << tp[a] << "/" << own[a] << " FP " << fp[a] << "/" << other[a] << " ("
           << fmt("%.4f", fpr) << ");";
  }
  detail << " recovery mismatches " << wrong_recovery << "; " << fmt("%.1f", secs) << "s";
  return {pass, detail.str()};
}

// 2. PocketStego random-terminator rate against 1 - (255/256)^8192.
Outcome criterion2() {
  const auto t0 = Clock::now();
  Prng rng(mix_seed(kSeed, 6));
  int flagged = 0;
  for (int i = 0; i < kC2Images; ++i)
    flagged += detect(AppId::PocketStego, testutil::random_image(256, 256, Channels::RGB, rng), kSigs).verdict;
  const double frac = double(flagged) / kC2Images;
  const double expect = 1.0 - std::pow(255.0 / 256.0, 8192);
  const double secs = seconds_since(t0);
  return {std::abs(frac - expect) <= kC2Tolerance && secs < kC2Budget,
          std::to_string(flagged) + "/" + std::to_string(kC2Images) + " flagged = " + fmt("%.4f", frac) +
              ", analytic " + fmt("%.6f", expect) + ", tolerance 0.02; " + fmt("%.1f", secs) + "s"};
}

// 3. extract(embed(m)) == m over random cases for every app.
Outcome criterion3() {
  static constexpr char kAlnum[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,";
  Prng rng(mix_seed(kSeed, 7));
  auto text = [&](std::size_t n) {
    Bytes b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(kAlnum[rng.uniform(sizeof(kAlnum) - 1)]);
    return b;
  };
  int failures = 0, cases = 0;
  for (AppId app : kAllApps) {
    for (int i = 0; i < kC3Cases; ++i, ++cases) {
      const int w = 48 + static_cast<int>(rng.uniform(80)), h = 48 + static_cast<int>(rng.uniform(80));
      const Channels ch = app == AppId::StegM ? (rng.uniform(2) ? Channels::Gray : Channels::RGB)
                                              : (rng.uniform(2) ? Channels::RGB : Channels::RGBA);
      const PixelImage cover = make_cover(app, testutil::random_image(w, h, ch, rng));
      const bool needs_pwd = app == AppId::MobiStego || app == AppId::StegM ||
                             (app != AppId::PocketStego && rng.uniform(4) != 0);
      const Bytes pwd = needs_pwd ? text(1 + rng.uniform(12)) : Bytes{};
      const std::size_t cap = capacity_bits(app, cover);
      const double min_rate = double(payload_len_bits(app, 1, pwd.size(), kSigs)) / cap;
      const double rate = min_rate + (1.0 - min_rate) * rng.uniform01();
      const RateSpec spec = message_len_for_target(app, cap, rate, pwd.size(), kSigs);
      const Bytes msg = text(spec.message_bytes);
      const EmbedResult r = embed(app, cover, build_payload(app, msg, pwd, kSigs), pwd);
      const auto got = extract_message(app, r.stego, pwd, kSigs);
      failures += !got || got->message != msg;
    }
  }
  return {failures == 0, std::to_string(cases) + " cases, " + std::to_string(failures) + " failures"};
}

// 4. Rate control, checked from the stored manifests.
Outcome criterion4() {
  std::size_t checked = 0, bad = 0;
  double worst_gap_bytes = 0.0;
  for (const DatasetManifest* m : {&signature_dataset(), &smooth_ml(), &noisy_ml()}) {
    for (const auto& r : m->records) {
      if (r.role != Role::Stego) continue;
      ++checked;
      const double cap = double(r.width) * r.height * bits_per_pixel(r.app);
      const double byte_unit = 8.0 / cap;
      const double recomputed = double(payload_len_bits(r.app, r.message_bytes, r.password.size(), kSigs)) / cap;
      const double gap = r.target_rate - r.achieved_rate;
      worst_gap_bytes = std::max(worst_gap_bytes, gap / byte_unit);
      if (r.achieved_rate > r.target_rate || gap >= byte_unit || std::abs(recomputed - r.achieved_rate) > 1e-12) ++bad;
    }
  }
  return {checked > 0 && bad == 0, std::to_string(checked) + " stegos, " + std::to_string(bad) +
                                       " violations, largest shortfall " + fmt("%.3f", worst_gap_bytes) +
                                       " message bytes"};
}

// 5a. StegM p_e falls with the rate.
Outcome criterion5a() {
  const auto t0 = Clock::now();
  const PairsByRate& pairs = smooth_pairs();
  const SplitSpec split{kMlTrain, kMlTest, mix_seed(kSeed, 8), 1};
  const ErrorReport lo = fixed_rate_experiment(pairs.at(0.02), split, auto_params(mix_seed(kSeed, 9)));
  const ErrorReport hi = fixed_rate_experiment(pairs.at(0.20), split, auto_params(mix_seed(kSeed, 9)));
  const double secs = seconds_since(t0);
  const bool pass = hi.p_e < lo.p_e - kC5aMargin && hi.p_e < kC5aCeiling && secs < kC5aBudget;
  return {pass, "p_e(2%) " + fmt("%.4f", lo.p_e) + ", p_e(20%) " + fmt("%.4f", hi.p_e) + " (needs < " +
                    fmt("%.4f", std::min(lo.p_e - kC5aMargin, kC5aCeiling)) + "); " + fmt("%.1f", secs) +
                    "s incl. generation and features"};
}

// 5b. Rate grid: diagonal cells are the row minima.
Outcome criterion5b() {
  const SplitSpec split{kMlTrain, kMlTest, mix_seed(kSeed, 10), 1};
  const RateGrid g = rate_grid(smooth_pairs(), {0.05, 0.20}, {0.05, 0.20}, split, auto_params(mix_seed(kSeed, 11)));
  const double d5 = g.at(0.05, 0.05).p_e, d20 = g.at(0.20, 0.20).p_e;
  const double tr20te5 = g.at(0.20, 0.05).p_e, tr5te20 = g.at(0.05, 0.20).p_e;
  const bool pass = d5 <= tr20te5 && d20 <= tr5te20 && tr20te5 - d5 > kC5bMargin;
  return {pass, "rows=test: te5 [tr5 " + fmt("%.4f", d5) + ", tr20 " + fmt("%.4f", tr20te5) + "], te20 [tr5 " +
                    fmt("%.4f", tr5te20) + ", tr20 " + fmt("%.4f", d20) + "]"};
}

// 5c. Noisy covers are harder than smooth covers at 10%.
Outcome criterion5c() {
  const SplitSpec split{kMlTrain, kMlTest, mix_seed(kSeed, 12), kC5cRepetitions};
  const auto noisy = collect_pairs(noisy_ml(), AppId::StegM, {0.10}, kThreads);
  const ErrorReport s = fixed_rate_experiment(smooth_pairs().at(0.10), split, auto_params(mix_seed(kSeed, 13)));
  const ErrorReport n = fixed_rate_experiment(noisy.at(0.10), split, auto_params(mix_seed(kSeed, 13)));
  return {n.p_e > s.p_e, "mean p_e over " + std::to_string(kC5cRepetitions) + " repetitions: noisy " +
                             fmt("%.4f", n.p_e) + ", smooth " + fmt("%.4f", s.p_e)};
}

// 5d. Cover-vs-cover with shuffled labels is chance.
Outcome criterion5d() {
  const auto& covers = smooth_pairs().at(0.10);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(covers.size()), kSrmMiniDim);
  std::vector<int> y(covers.size());
  for (std::size_t i = 0; i < covers.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = covers[i].cover.transpose();
    y[i] = static_cast<int>(i % 2);
  }
  Prng rng(mix_seed(kSeed, 14));
  for (std::size_t i = y.size() - 1; i > 0; --i) std::swap(y[i], y[rng.uniform(i + 1)]);
  const EnsembleModel m = train(x, y, auto_params(mix_seed(kSeed, 15)));
  return {m.oob_error >= kNullLo && m.oob_error <= kNullHi,
          "oob " + fmt("%.4f", m.oob_error) + " with " + std::to_string(m.learners.size()) + " learners, d_sub " +
              std::to_string(m.d_sub)};
}

// 6. Feature extractor invariants and the naive oracle.
Outcome criterion6() {
  bool pass = kSrmMiniDim == 1014;
  const int zero = symmetry_class_table()[cooccurrence_bin(0, 0, 0, 0)];
  for (int v : {0, 77, 255}) {
    PixelImage g(19, 23, Channels::Gray);
    for (auto& s : g.samples()) s = static_cast<std::uint8_t>(v);
    const FeatureVector f = srm_mini(g);
    for (int k = 0; k < kSrmMiniDim; ++k) pass = pass && f[k] == (k % kSymmetryClasses == zero ? 1.0 : 0.0);
  }
  Prng rng(mix_seed(kSeed, 16));
  int sign_ok = 0, oracle_ok = 0;
  for (int i = 0; i < 20; ++i) {
    const PixelImage g = testutil::random_image(32, 32, Channels::Gray, rng);
    PixelImage inv = g;
    for (auto& s : inv.samples()) s = static_cast<std::uint8_t>(255 - s);
    const FeatureVector f = srm_mini(g);
    sign_ok += (srm_mini(inv) - f).cwiseAbs().maxCoeff() == 0.0;
    const auto oracle = naive::naive_srm_mini(g);
    bool same = oracle.size() == 1014;
    for (int k = 0; same && k < 1014; ++k) same = f[k] == oracle[k];
    oracle_ok += same;
  }
  pass = pass && sign_ok == 20 && oracle_ok == 20;
  return {pass, "dim " + std::to_string(kSrmMiniDim) + ", constant images exact, sign symmetry " +
                    std::to_string(sign_ok) + "/20, oracle match " + std::to_string(oracle_ok) + "/20"};
}

// 7. CLI reruns with the same seed are byte-identical.
std::uint64_t tree_hash(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    Bytes content(std::istreambuf_iterator<char>(in), {});
    const std::string rel = fs::relative(f, root).generic_string();
    content.insert(content.begin(), rel.begin(), rel.end());
    h = mix_seed(h, fnv1a64(content));
  }
  return h;
}

bool cli(const std::string& args) {
  const std::string cmd = std::string(APPSTEG_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

Outcome criterion7() {
  const fs::path root = work_root() / "determinism";
  fs::create_directories(root);
  bool ran = true;
  for (const std::string run : {"a", "b"}) {
    std::ofstream(root / (run + ".json"))
        << R"({"output_dir": ")" << (root / run / "data").string()
        << R"(", "apps": ["StegMaster", "DaVinci", "MobiStego", "PocketStego", "StegM"], "rates": [0.2],)"
        << R"( "synth": {"count": 12, "width": 96, "height": 96, "channels": 3, "class": "smooth"}})";
    const fs::path dir = root / run;
    ran = ran && cli("--seed 99 gen-dataset --config '" + (root / (run + ".json")).string() + "'");
    ran = ran && cli("features --manifest '" + (dir / "data/manifest.jsonl").string() + "' --app StegM --out '" +
                     (dir / "features.csv").string() + "'");
    ran = ran && cli("--seed 7 train --features '" + (dir / "features.csv").string() + "' --model '" +
                     (dir / "model/model.json").string() + "'");
  }
  const std::uint64_t da = tree_hash(root / "a/data"), db = tree_hash(root / "b/data");
  const std::uint64_t ma = tree_hash(root / "a/model"), mb = tree_hash(root / "b/model");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "dataset %016llx vs %016llx, model %016llx vs %016llx",
                static_cast<unsigned long long>(da), static_cast<unsigned long long>(db),
                static_cast<unsigned long long>(ma), static_cast<unsigned long long>(mb));
  return {ran && da == db && ma == mb, std::string(ran ? "" : "CLI failure; ") + buf};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1", criterion1},   {"2", criterion2},   {"3", criterion3},   {"4", criterion4}, {"5a", criterion5a},
      {"5b", criterion5b}, {"5c", criterion5c}, {"5d", criterion5d}, {"6", criterion6}, {"7", criterion7}};
  const std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [label, fn] : criteria) {
    if (!only.empty() && !only.count(label)) continue;
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << label << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
