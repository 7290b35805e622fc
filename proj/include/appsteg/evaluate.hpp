#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "appsteg/ensemble.hpp"
#include "appsteg/features.hpp"
#include "appsteg/manifest.hpp"

namespace appsteg {

/// p_md = missed stegos / stegos, p_fa = flagged covers / covers,
/// p_e = (p_md + p_fa) / 2.
struct ErrorReport {
  double p_md = 0.0;
  double p_fa = 0.0;
  double p_e = 0.0;
  std::size_t n_cover = 0;
  std::size_t n_stego = 0;

  bool operator==(const ErrorReport&) const = default;
};

/// Labels 0 cover, 1 stego. Throws std::invalid_argument on length mismatch
/// or when truth holds only one class.
ErrorReport p_e(const std::vector<int>& truth, const std::vector<int>& pred);

std::string report_to_json(const ErrorReport& r);
ErrorReport report_from_json(const std::string& text);

/// Features of one cover and its stego.
struct FeaturePair {
  std::string source_id;
  FeatureVector cover;
  FeatureVector stego;
};

using PairsByRate = std::map<double, std::vector<FeaturePair>>;

/// Cover/stego feature pairs of one app at the given target rates, sorted by
/// source_id. Cover features are computed once and shared across rates.
PairsByRate collect_pairs(const DatasetManifest& manifest, AppId app, const std::vector<double>& rates,
                          int threads = 1);

struct SplitSpec {
  int n_train_pairs = 0;
  int n_test_pairs = 0;
  std::uint64_t seed = 0;
  /// The test pairs stay fixed; the training subset is re-drawn per repetition
  /// and the reports are averaged.
  int repetitions = 1;
};

struct SourceSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Shuffles the ids with the split seed, takes the first n_test as the test
/// side and draws n_train of the rest (re-drawn per repetition). The two
/// sides never share an id.
SourceSplit split_sources(std::vector<std::string> ids, int n_train, int n_test, std::uint64_t seed,
                          int repetition = 0);

/// Train on the cover/stego pairs in `train`, report on those in `test`.
ErrorReport train_and_test(const std::vector<const FeaturePair*>& train,
                           const std::vector<const FeaturePair*>& test, const TrainParams& params);

/// Train/test at one rate with a pair-level split, averaged over repetitions.
ErrorReport fixed_rate_experiment(const std::vector<FeaturePair>& pairs, const SplitSpec& split,
                                  const TrainParams& params);

struct RateGrid {
  std::vector<double> train_rates;
  std::vector<double> test_rates;
  std::map<std::pair<double, double>, ErrorReport> cells;  // (train, test)

  const ErrorReport& at(double train_rate, double test_rate) const;
};

/// One classifier per train rate (per repetition), evaluated on every test
/// rate's held-out pairs. Only sources carrying pairs at every listed rate are
/// used, so train and test sources are disjoint across the whole grid.
RateGrid rate_grid(const PairsByRate& pairs, const std::vector<double>& train_rates,
                   const std::vector<double>& test_rates, const SplitSpec& split,
                   const TrainParams& params);

RateGrid run_rate_grid(const DatasetManifest& manifest, AppId app, const std::vector<double>& train_rates,
                       const std::vector<double>& test_rates, const SplitSpec& split,
                       const TrainParams& params);

/// Leave-one-source-out. For each source class: train on up to n_train pairs
/// pooled from the other classes, test on up to n_test pairs of the held-out
/// class. Needs at least two classes.
std::map<std::string, ErrorReport> source_mismatch(
    const std::map<std::string, std::vector<FeaturePair>>& pairs_by_source, const SplitSpec& split,
    const TrainParams& params);

std::map<std::string, ErrorReport> run_source_mismatch(
    const std::map<std::string, DatasetManifest>& manifests_by_source, AppId app, double rate,
    const SplitSpec& split, const TrainParams& params);

std::string grid_to_json(const RateGrid& grid);
RateGrid grid_from_json(const std::string& text);
/// p_e table: one row per test rate, one column per train rate.
std::string grid_to_csv(const RateGrid& grid);
std::string mismatch_to_json(const std::map<std::string, ErrorReport>& reports);

}  // namespace appsteg
