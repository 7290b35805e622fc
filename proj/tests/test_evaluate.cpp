#include <doctest.h>

#include <algorithm>
#include <set>

#include "appsteg/evaluate.hpp"
#include "appsteg/prng.hpp"

using namespace appsteg;

namespace {

// Stego = cover + rate-proportional shift on a few coordinates.
std::vector<FeaturePair> synthetic_pairs(int n, int dim, double rate, std::uint64_t seed, const std::string& prefix = "s") {
  std::vector<FeaturePair> out;
  for (int i = 0; i < n; ++i) {
    Prng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    FeaturePair p;
    p.source_id = prefix + std::to_string(1000 + i);
    p.cover.resize(dim);
    for (int k = 0; k < dim; ++k) p.cover[k] = rng.normal();
    p.stego = p.cover;
    for (int k = 0; k < dim; k += 4) p.stego[k] += 8.0 * rate + 0.3 * rng.normal();
    out.push_back(std::move(p));
  }
  return out;
}

TrainParams quick(std::uint64_t seed = 1) {
  TrainParams p;
  p.n_learners = 15;
  p.d_sub = 16;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("p_e examples") {
  // 10 covers, 10 stegos; one false alarm, three misses.
  std::vector<int> truth(10, 0), pred(10, 0);
  truth.resize(20, 1);
  pred.resize(20, 1);
  pred[0] = 1;
  pred[10] = pred[11] = pred[12] = 0;
  const ErrorReport r = p_e(truth, pred);
  CHECK(r.p_fa == doctest::Approx(0.1));
  CHECK(r.p_md == doctest::Approx(0.3));
  CHECK(r.p_e == doctest::Approx(0.2));
  CHECK(r.n_cover == 10);
  CHECK(r.n_stego == 10);

  CHECK(p_e(truth, truth).p_e == 0.0);
  CHECK(p_e(truth, std::vector<int>(20, 0)).p_e == 0.5);
  CHECK(p_e(truth, std::vector<int>(20, 1)).p_e == 0.5);

  CHECK_THROWS_AS(p_e({0, 1}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(p_e({0, 0}, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(p_e({0, 2}, {0, 1}), std::invalid_argument);
}

TEST_CASE("swapping class names swaps p_md and p_fa") {
  Prng rng(8);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> truth(30), pred(30);
    for (int i = 0; i < 30; ++i) {
      truth[i] = i % 2;
      pred[i] = static_cast<int>(rng.uniform(2));
    }
    std::vector<int> ft(truth), fp(pred);
    for (auto& v : ft) v = 1 - v;
    for (auto& v : fp) v = 1 - v;
    const ErrorReport a = p_e(truth, pred), b = p_e(ft, fp);
    CHECK(a.p_md == b.p_fa);
    CHECK(a.p_fa == b.p_md);
    CHECK(a.p_e == doctest::Approx(b.p_e));
    CHECK(a.p_e >= 0.0);
    CHECK(a.p_e <= 1.0);
  }
}

TEST_CASE("report JSON round trip") {
  const ErrorReport r{0.125, 0.3, 0.2125, 40, 41};
  CHECK(report_from_json(report_to_json(r)) == r);
}

TEST_CASE("source splits are disjoint, sorted and seed-determined") {
  std::vector<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.push_back("id" + std::to_string(i));
  ids.push_back("id3");  // duplicate is ignored
  const SourceSplit s = split_sources(ids, 20, 15, 7);
  CHECK(s.train.size() == 20);
  CHECK(s.test.size() == 15);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  std::vector<std::string> both;
  std::set_intersection(s.train.begin(), s.train.end(), s.test.begin(), s.test.end(), std::back_inserter(both));
  CHECK(both.empty());

  const SourceSplit again = split_sources(ids, 20, 15, 7);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  // Repetitions keep the test side and re-draw training.
  const SourceSplit rep1 = split_sources(ids, 20, 15, 7, 1);
  CHECK(rep1.test == s.test);
  CHECK(rep1.train != s.train);
  CHECK(split_sources(ids, 20, 15, 8).test != s.test);

  CHECK_THROWS_AS(split_sources(ids, 40, 15, 7), std::invalid_argument);
}

TEST_CASE("fixed-rate experiment separates a strong shift and not a null one") {
  const auto strong = synthetic_pairs(120, 64, 0.5, 1);
  const auto null = synthetic_pairs(120, 64, 0.0, 2);
  const SplitSpec split{60, 60, 5, 2};
  const ErrorReport a = fixed_rate_experiment(strong, split, quick());
  const ErrorReport b = fixed_rate_experiment(null, split, quick());
  CHECK(a.n_cover == 60);
  CHECK(a.n_stego == 60);
  CHECK(a.p_e < 0.05);
  CHECK(b.p_e > 0.3);
  CHECK(fixed_rate_experiment(strong, split, quick()) == a);
  CHECK_THROWS_AS(fixed_rate_experiment(strong, SplitSpec{100, 60, 5, 1}, quick()), std::invalid_argument);
}

TEST_CASE("rate grid is square over the listed rates and rows are test rates") {
  PairsByRate pairs;
  for (double r : {0.05, 0.1, 0.3}) pairs[r] = synthetic_pairs(100, 48, r, 3);  // same sources at every rate
  pairs[0.3].pop_back();  // one source lacks a rate: it drops out everywhere
  const SplitSpec split{40, 40, 9, 1};
  const RateGrid g = rate_grid(pairs, {0.05, 0.3}, {0.05, 0.1, 0.3}, split, quick());
  CHECK(g.cells.size() == 6);
  CHECK(g.at(0.3, 0.3).p_e < g.at(0.05, 0.05).p_e + 1e-12);
  CHECK(g.at(0.05, 0.3).p_e < 0.2);
  CHECK_THROWS(g.at(0.1, 0.1));

  const RateGrid back = grid_from_json(grid_to_json(g));
  CHECK(back.train_rates == g.train_rates);
  CHECK(back.test_rates == g.test_rates);
  CHECK(back.cells == g.cells);

  const std::string csv = grid_to_csv(g);
  CHECK(csv.rfind("test\\train,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const SplitSpec too_big{80, 40, 9, 1};
  CHECK_THROWS_AS(rate_grid(pairs, {0.05}, {0.1}, too_big, quick()), std::invalid_argument);
}

TEST_CASE("source mismatch holds out each class in turn") {
  std::map<std::string, std::vector<FeaturePair>> by_source;
  by_source["a"] = synthetic_pairs(60, 32, 0.4, 4, "a");
  by_source["b"] = synthetic_pairs(60, 32, 0.4, 5, "b");
  by_source["c"] = synthetic_pairs(60, 32, 0.0, 6, "c");
  const auto reports = source_mismatch(by_source, SplitSpec{50, 30, 2, 1}, quick());
  REQUIRE(reports.size() == 3);
  CHECK(reports.at("a").n_cover == 30);
  CHECK(reports.at("c").p_e > 0.3);  // nothing to detect in the held-out class
  CHECK(reports.at("a").p_e < 0.25);
  CHECK(mismatch_to_json(reports).find("\"c\"") != std::string::npos);

  std::map<std::string, std::vector<FeaturePair>> one{{"a", by_source["a"]}};
  CHECK_THROWS_AS(source_mismatch(one, SplitSpec{10, 10, 2, 1}, quick()), std::invalid_argument);
}
