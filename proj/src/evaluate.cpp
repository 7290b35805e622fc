#include "appsteg/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "appsteg/datagen.hpp"
#include "appsteg/feature_io.hpp"
#include "appsteg/parallel.hpp"
#include "appsteg/prng.hpp"

namespace appsteg {

using nlohmann::ordered_json;

ErrorReport p_e(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.size() != pred.size()) throw std::invalid_argument("truth and predictions differ in length");
  ErrorReport r;
  std::size_t missed = 0, false_alarms = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      ++r.n_stego;
      if (pred[i] != 1) ++missed;
    } else if (truth[i] == 0) {
      ++r.n_cover;
      if (pred[i] == 1) ++false_alarms;
    } else {
      throw std::invalid_argument("truth labels must be 0 or 1");
    }
  }
  if (r.n_cover == 0 || r.n_stego == 0) throw std::invalid_argument("truth must contain both classes");
  r.p_md = static_cast<double>(missed) / static_cast<double>(r.n_stego);
  r.p_fa = static_cast<double>(false_alarms) / static_cast<double>(r.n_cover);
  r.p_e = 0.5 * (r.p_md + r.p_fa);
  return r;
}

namespace {

ordered_json report_json(const ErrorReport& r) {
  return {{"p_md", r.p_md}, {"p_fa", r.p_fa}, {"p_e", r.p_e}, {"n_cover", r.n_cover}, {"n_stego", r.n_stego}};
}

ErrorReport report_of(const nlohmann::json& j) {
  ErrorReport r;
  r.p_md = j.at("p_md").get<double>();
  r.p_fa = j.at("p_fa").get<double>();
  r.p_e = j.at("p_e").get<double>();
  r.n_cover = j.at("n_cover").get<std::size_t>();
  r.n_stego = j.at("n_stego").get<std::size_t>();
  return r;
}

ErrorReport average(const std::vector<ErrorReport>& reports) {
  ErrorReport avg;
  for (const auto& r : reports) {
    avg.p_md += r.p_md;
    avg.p_fa += r.p_fa;
    avg.n_cover += r.n_cover;
    avg.n_stego += r.n_stego;
  }
  const double n = static_cast<double>(reports.size());
  avg.p_md /= n;
  avg.p_fa /= n;
  avg.p_e = 0.5 * (avg.p_md + avg.p_fa);
  avg.n_cover /= reports.size();
  avg.n_stego /= reports.size();
  return avg;
}

bool same_rate(double a, double b) { return std::abs(a - b) < 1e-9; }

std::uint64_t label_hash(const std::string& s) {
  return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

std::map<std::string, const FeaturePair*> index_by_source(const std::vector<FeaturePair>& pairs) {
  std::map<std::string, const FeaturePair*> out;
  for (const auto& p : pairs) out[p.source_id] = &p;
  return out;
}

std::vector<const FeaturePair*> pick(const std::map<std::string, const FeaturePair*>& index,
                                     const std::vector<std::string>& ids) {
  std::vector<const FeaturePair*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(index.at(id));
  return out;
}

// Interleaved cover/stego rows with labels 0/1.
Eigen::MatrixXd stack_pairs(const std::vector<const FeaturePair*>& pairs, std::vector<int>& labels) {
  if (pairs.empty()) throw std::invalid_argument("empty train or test set");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(2 * pairs.size()), pairs.front()->cover.size());
  labels.clear();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    x.row(static_cast<Eigen::Index>(2 * i)) = pairs[i]->cover.transpose();
    x.row(static_cast<Eigen::Index>(2 * i + 1)) = pairs[i]->stego.transpose();
    labels.push_back(0);
    labels.push_back(1);
  }
  return x;
}

EnsembleModel train_on(const std::vector<const FeaturePair*>& pairs, const TrainParams& params) {
  std::vector<int> y;
  const Eigen::MatrixXd x = stack_pairs(pairs, y);
  return appsteg::train(x, y, params);
}

ErrorReport test_on(const EnsembleModel& model, const std::vector<const FeaturePair*>& pairs) {
  std::vector<int> truth;
  const Eigen::MatrixXd t = stack_pairs(pairs, truth);
  return p_e(truth, predict(model, t));
}

}  // namespace

std::string report_to_json(const ErrorReport& r) { return report_json(r).dump(); }

ErrorReport report_from_json(const std::string& text) { return report_of(nlohmann::json::parse(text)); }

PairsByRate collect_pairs(const DatasetManifest& manifest, AppId app, const std::vector<double>& rates,
                          int threads) {
  std::map<std::string, const ManifestRecord*> covers;
  for (const auto& r : manifest.records)
    if (r.app == app && r.role == Role::Cover) covers[r.source_id] = &r;

  // (rate index, source) -> stego record
  std::vector<std::map<std::string, const ManifestRecord*>> stegos(rates.size());
  for (const auto& r : manifest.records) {
    if (r.app != app || r.role != Role::Stego || !covers.count(r.source_id)) continue;
    for (std::size_t k = 0; k < rates.size(); ++k)
      if (same_rate(r.target_rate, rates[k])) stegos[k][r.source_id] = &r;
  }

  std::vector<const ManifestRecord*> jobs;
  std::map<const ManifestRecord*, std::size_t> slot;
  auto want = [&](const ManifestRecord* r) {
    if (slot.emplace(r, jobs.size()).second) jobs.push_back(r);
  };
  for (const auto& per_rate : stegos)
    for (const auto& [id, rec] : per_rate) {
      want(covers.at(id));
      want(rec);
    }

  std::vector<FeatureVector> feats(jobs.size());
  parallel_for(jobs.size(), threads,
               [&](std::size_t i) { feats[i] = image_features(read_png_file(manifest.file_of(*jobs[i]))); });

  PairsByRate out;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    auto& list = out[rates[k]];
    for (const auto& [id, rec] : stegos[k])
      list.push_back({id, feats[slot.at(covers.at(id))], feats[slot.at(rec)]});
  }
  return out;
}

SourceSplit split_sources(std::vector<std::string> ids, int n_train, int n_test, std::uint64_t seed,
                          int repetition) {
  if (n_train < 1 || n_test < 1) throw std::invalid_argument("split sizes must be positive");
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < static_cast<std::size_t>(n_train) + static_cast<std::size_t>(n_test))
    throw std::invalid_argument("need " + std::to_string(n_train + n_test) + " sources, have " +
                                std::to_string(ids.size()));
  auto shuffle = [](std::vector<std::string>& v, Prng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.uniform(i)]);
  };
  Prng rng(mix_seed(seed, 0));
  shuffle(ids, rng);
  SourceSplit s;
  s.test.assign(ids.begin(), ids.begin() + n_test);
  std::vector<std::string> pool(ids.begin() + n_test, ids.end());
  Prng draw(mix_seed(seed, 1 + static_cast<std::uint64_t>(repetition)));
  shuffle(pool, draw);
  s.train.assign(pool.begin(), pool.begin() + n_train);
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

ErrorReport train_and_test(const std::vector<const FeaturePair*>& train,
                           const std::vector<const FeaturePair*>& test, const TrainParams& params) {
  return test_on(train_on(train, params), test);
}

ErrorReport fixed_rate_experiment(const std::vector<FeaturePair>& pairs, const SplitSpec& split,
                                  const TrainParams& params) {
  const auto index = index_by_source(pairs);
  std::vector<std::string> ids;
  for (const auto& [id, p] : index) ids.push_back(id);
  std::vector<ErrorReport> reports;
  for (int rep = 0; rep < std::max(1, split.repetitions); ++rep) {
    const SourceSplit s = split_sources(ids, split.n_train_pairs, split.n_test_pairs, split.seed, rep);
    TrainParams p = params;
    p.seed = mix_seed(params.seed, static_cast<std::uint64_t>(rep));
    reports.push_back(train_and_test(pick(index, s.train), pick(index, s.test), p));
  }
  return average(reports);
}

const ErrorReport& RateGrid::at(double train_rate, double test_rate) const {
  for (const auto& [key, report] : cells)
    if (same_rate(key.first, train_rate) && same_rate(key.second, test_rate)) return report;
  throw std::out_of_range("no grid cell for train " + rate_label(train_rate) + ", test " +
                          rate_label(test_rate));
}

RateGrid rate_grid(const PairsByRate& pairs, const std::vector<double>& train_rates,
                   const std::vector<double>& test_rates, const SplitSpec& split,
                   const TrainParams& params) {
  if (train_rates.empty() || test_rates.empty()) throw std::invalid_argument("empty rate list");
  std::vector<double> all = train_rates;
  all.insert(all.end(), test_rates.begin(), test_rates.end());

  std::map<double, std::map<std::string, const FeaturePair*>> index;
  for (double r : all) {
    const auto it = std::find_if(pairs.begin(), pairs.end(), [&](const auto& kv) { return same_rate(kv.first, r); });
    if (it == pairs.end()) throw std::invalid_argument("no pairs at rate " + rate_label(r));
    index[r] = index_by_source(it->second);
  }

  // Sources usable everywhere, so no source can sit on both sides of any cell.
  std::vector<std::string> common;
  for (const auto& [id, p] : index.begin()->second) {
    bool everywhere = true;
    for (const auto& [r, idx] : index) everywhere = everywhere && idx.count(id);
    if (everywhere) common.push_back(id);
  }
  const std::size_t needed = static_cast<std::size_t>(split.n_train_pairs) + split.n_test_pairs;
  if (common.size() < needed) {
    for (double tr : train_rates)
      for (double te : test_rates)
        if (index[tr].size() < needed || index[te].size() < needed || common.size() < needed)
          throw std::invalid_argument("cell (train " + rate_label(tr) + ", test " + rate_label(te) +
                                      "): " + std::to_string(common.size()) +
                                      " sources have pairs at every rate, need " + std::to_string(needed));
  }

  RateGrid grid{train_rates, test_rates, {}};
  std::map<std::pair<double, double>, std::vector<ErrorReport>> per_cell;
  for (int rep = 0; rep < std::max(1, split.repetitions); ++rep) {
    const SourceSplit s = split_sources(common, split.n_train_pairs, split.n_test_pairs, split.seed, rep);
    for (double tr : train_rates) {
      TrainParams p = params;
      p.seed = mix_seed(mix_seed(params.seed, static_cast<std::uint64_t>(rep)), label_hash(rate_label(tr)));
      const EnsembleModel model = train_on(pick(index[tr], s.train), p);
      for (double te : test_rates) per_cell[{tr, te}].push_back(test_on(model, pick(index[te], s.test)));
    }
  }
  for (const auto& [key, reports] : per_cell) grid.cells[key] = average(reports);
  return grid;
}

RateGrid run_rate_grid(const DatasetManifest& manifest, AppId app, const std::vector<double>& train_rates,
                       const std::vector<double>& test_rates, const SplitSpec& split,
                       const TrainParams& params) {
  std::vector<double> all = train_rates;
  for (double r : test_rates)
    if (std::none_of(all.begin(), all.end(), [&](double a) { return same_rate(a, r); })) all.push_back(r);
  return rate_grid(collect_pairs(manifest, app, all, params.threads), train_rates, test_rates, split, params);
}

std::map<std::string, ErrorReport> source_mismatch(
    const std::map<std::string, std::vector<FeaturePair>>& pairs_by_source, const SplitSpec& split,
    const TrainParams& params) {
  if (pairs_by_source.size() < 2) throw std::invalid_argument("source mismatch needs at least two sources");
  std::map<std::string, ErrorReport> out;
  for (const auto& [held_out, test_pairs] : pairs_by_source) {
    std::vector<const FeaturePair*> pool;
    for (const auto& [name, list] : pairs_by_source)
      if (name != held_out)
        for (const auto& p : list) pool.push_back(&p);
    std::vector<const FeaturePair*> test;
    for (const auto& p : test_pairs) test.push_back(&p);
    if (pool.empty() || test.empty())
      throw std::invalid_argument("source '" + held_out + "' leaves an empty train or test side");

    // Fixed test subset per held-out class, training subset re-drawn per repetition.
    const std::uint64_t class_seed = mix_seed(split.seed, label_hash(held_out));
    Prng test_rng(mix_seed(class_seed, 0));
    for (std::size_t i = test.size(); i > 1; --i) std::swap(test[i - 1], test[test_rng.uniform(i)]);
    if (split.n_test_pairs > 0 && test.size() > static_cast<std::size_t>(split.n_test_pairs))
      test.resize(static_cast<std::size_t>(split.n_test_pairs));

    std::vector<ErrorReport> reports;
    for (int rep = 0; rep < std::max(1, split.repetitions); ++rep) {
      auto train = pool;
      Prng rng(mix_seed(class_seed, 1 + static_cast<std::uint64_t>(rep)));
      for (std::size_t i = train.size(); i > 1; --i) std::swap(train[i - 1], train[rng.uniform(i)]);
      if (split.n_train_pairs > 0 && train.size() > static_cast<std::size_t>(split.n_train_pairs))
        train.resize(static_cast<std::size_t>(split.n_train_pairs));
      TrainParams p = params;
      p.seed = mix_seed(class_seed, 1000 + static_cast<std::uint64_t>(rep));
      reports.push_back(train_and_test(train, test, p));
    }
    out[held_out] = average(reports);
  }
  return out;
}

std::map<std::string, ErrorReport> run_source_mismatch(
    const std::map<std::string, DatasetManifest>& manifests_by_source, AppId app, double rate,
    const SplitSpec& split, const TrainParams& params) {
  if (manifests_by_source.size() < 2) throw std::invalid_argument("source mismatch needs at least two sources");
  std::map<std::string, std::vector<FeaturePair>> pairs;
  for (const auto& [name, manifest] : manifests_by_source) {
    auto by_rate = collect_pairs(manifest, app, {rate}, params.threads);
    pairs[name] = std::move(by_rate.begin()->second);
  }
  return source_mismatch(pairs, split, params);
}

std::string grid_to_json(const RateGrid& grid) {
  ordered_json cells = ordered_json::array();
  for (const auto& [key, r] : grid.cells) {
    ordered_json c = {{"train_rate", key.first}, {"test_rate", key.second}};
    c.update(report_json(r));
    cells.push_back(c);
  }
  const ordered_json j = {{"train_rates", grid.train_rates}, {"test_rates", grid.test_rates}, {"cells", cells}};
  return j.dump();
}

RateGrid grid_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RateGrid g;
  g.train_rates = j.at("train_rates").get<std::vector<double>>();
  g.test_rates = j.at("test_rates").get<std::vector<double>>();
  for (const auto& c : j.at("cells"))
    g.cells[{c.at("train_rate").get<double>(), c.at("test_rate").get<double>()}] = report_of(c);
  for (double tr : g.train_rates)
    for (double te : g.test_rates) (void)g.at(tr, te);
  return g;
}

std::string grid_to_csv(const RateGrid& grid) {
  std::ostringstream out;
  out << "test\\train";
  for (double tr : grid.train_rates) out << ',' << rate_label(tr);
  out << '\n';
  char buf[32];
  for (double te : grid.test_rates) {
    out << rate_label(te);
    for (double tr : grid.train_rates) {
      std::snprintf(buf, sizeof(buf), ",%.4f", grid.at(tr, te).p_e);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string mismatch_to_json(const std::map<std::string, ErrorReport>& reports) {
  ordered_json j = ordered_json::object();
  for (const auto& [name, r] : reports) j[name] = report_json(r);
  return j.dump();
}

}  // namespace appsteg
