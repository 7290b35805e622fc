#include <doctest.h>

#include <Eigen/Dense>

#include "appsteg/ensemble.hpp"
#include "appsteg/prng.hpp"
#include "test_util.hpp"

using namespace appsteg;

namespace {

Eigen::MatrixXd gaussian_rows(int n, int d, double shift, Prng& rng) {
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal() + (j % 3 == 0 ? shift : 0.0);
  return m;
}

struct Labeled {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

Labeled two_classes(int n_each, int d, double shift, Prng& rng) {
  Labeled out;
  out.x.resize(2 * n_each, d);
  out.x.topRows(n_each) = gaussian_rows(n_each, d, 0.0, rng);
  out.x.bottomRows(n_each) = gaussian_rows(n_each, d, shift, rng);
  out.y.assign(n_each, 0);
  out.y.resize(2 * n_each, 1);
  return out;
}

Eigen::MatrixXd unbiased_cov(const Eigen::MatrixXd& rows) {
  const Eigen::RowVectorXd mu = rows.colwise().mean();
  const Eigen::MatrixXd c = rows.rowwise() - mu;
  return c.transpose() * c / static_cast<double>(rows.rows() - 1);
}

}  // namespace

TEST_CASE("FLD matches the regularized normal equations") {
  Prng rng(77);
  const Eigen::MatrixXd c = gaussian_rows(60, 10, 0.0, rng);
  const Eigen::MatrixXd s = gaussian_rows(45, 10, 0.7, rng);
  for (double lambda : {1e-3, 0.5}) {
    const FldFit fit = fit_fld(c, s, lambda);
    const Eigen::VectorXd mu0 = c.colwise().mean().transpose(), mu1 = s.colwise().mean().transpose();
    const Eigen::MatrixXd sw = unbiased_cov(c) + unbiased_cov(s) + lambda * Eigen::MatrixXd::Identity(10, 10);
    const Eigen::VectorXd w = sw.colPivHouseholderQr().solve(mu1 - mu0);
    CHECK(fit.lambda == lambda);
    CHECK((fit.w - w).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(fit.bias - w.dot(0.5 * (mu0 + mu1))) < 1e-8);
  }
  // Default regularization scales with the within-class scatter.
  const FldFit def = fit_fld(c, s);
  const double tr = (unbiased_cov(c) + unbiased_cov(s)).trace();
  CHECK(def.lambda == doctest::Approx(1e-6 * tr / 10).epsilon(1e-12));
}

TEST_CASE("FLD survives singular scatter") {
  // Duplicated column and constant column: S_w is singular without lambda.
  Prng rng(5);
  Eigen::MatrixXd c = gaussian_rows(20, 4, 0.0, rng), s = gaussian_rows(20, 4, 1.0, rng);
  c.col(1) = c.col(0);
  s.col(1) = s.col(0);
  c.col(3).setConstant(2.0);
  s.col(3).setConstant(2.0);
  const FldFit fit = fit_fld(c, s);
  CHECK(fit.w.allFinite());
  CHECK(std::isfinite(fit.bias));
}

TEST_CASE("separable data is learned, shuffled labels are not") {
  Prng rng(11);
  const Labeled sep = two_classes(150, 64, 2.0, rng);
  TrainParams p;
  p.seed = 3;
  const EnsembleModel m = train(sep.x, sep.y, p);
  CHECK(m.learners.size() % 2 == 1);
  CHECK(static_cast<int>(m.learners.size()) <= kMaxLearners);
  CHECK(m.feature_dim == 64);
  CHECK(m.oob_error < 0.02);

  const Labeled fresh = two_classes(100, 64, 2.0, rng);
  const auto pred = predict(m, fresh.x);
  int wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != fresh.y[i];
  CHECK(wrong < 6);

  Labeled shuffled = two_classes(200, 64, 0.0, rng);
  for (std::size_t i = shuffled.y.size() - 1; i > 0; --i) std::swap(shuffled.y[i], shuffled.y[rng.uniform(i + 1)]);
  TrainParams q;
  q.seed = 4;
  q.n_learners = 51;
  q.d_sub = 16;
  const EnsembleModel noise = train(shuffled.x, shuffled.y, q);
  CHECK(noise.learners.size() == 51);
  CHECK(noise.oob_error >= 0.40);
  CHECK(noise.oob_error <= 0.60);
}

TEST_CASE("subspaces are sorted, unique and of size d_sub") {
  Prng rng(12);
  const Labeled d = two_classes(40, 30, 1.0, rng);
  TrainParams p;
  p.n_learners = 10;  // even counts are bumped to odd
  p.d_sub = 8;
  const EnsembleModel m = train(d.x, d.y, p);
  CHECK(m.learners.size() == 11);
  CHECK(m.d_sub == 8);
  for (const auto& l : m.learners) {
    REQUIRE(l.subspace.size() == 8);
    CHECK(std::is_sorted(l.subspace.begin(), l.subspace.end()));
    CHECK(std::adjacent_find(l.subspace.begin(), l.subspace.end()) == l.subspace.end());
    CHECK(l.subspace.back() < 30);
  }
}

TEST_CASE("training is deterministic across thread counts and reruns") {
  Prng rng(13);
  const Labeled d = two_classes(60, 40, 0.8, rng);
  TrainParams p;
  p.seed = 99;
  p.threads = 1;
  const EnsembleModel a = train(d.x, d.y, p);
  p.threads = 3;
  const EnsembleModel b = train(d.x, d.y, p);
  CHECK(model_to_json(a) == model_to_json(b));
  p.seed = 100;
  CHECK(model_to_json(train(d.x, d.y, p)) != model_to_json(a));
}

TEST_CASE("model JSON round trip is bit-exact") {
  Prng rng(14);
  const Labeled d = two_classes(50, 20, 1.0, rng);
  TrainParams p;
  p.n_learners = 7;
  p.d_sub = 8;
  p.seed = 1;
  const EnsembleModel m = train(d.x, d.y, p);
  const EnsembleModel back = model_from_json(model_to_json(m));
  REQUIRE(back.learners.size() == m.learners.size());
  for (std::size_t i = 0; i < m.learners.size(); ++i) {
    CHECK(back.learners[i].subspace == m.learners[i].subspace);
    CHECK(back.learners[i].w == m.learners[i].w);
    CHECK(back.learners[i].bias == m.learners[i].bias);
  }
  CHECK(back.oob_error == m.oob_error);
  CHECK(back.training_seed == m.training_seed);
  CHECK(predict(back, d.x) == predict(m, d.x));

  testutil::TempDir dir("model");
  save_model(dir / "m.json", m);
  CHECK(model_to_json(load_model(dir / "m.json")) == model_to_json(m));
  CHECK_THROWS(model_from_json("{\"learners\": 3}"));
}

TEST_CASE("bad training input is rejected") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 3);
  CHECK_THROWS_AS(train(x, {0, 1, 0}, TrainParams{}), std::invalid_argument);
  CHECK_THROWS_AS(train(x, {0, 0, 0, 0}, TrainParams{}), std::invalid_argument);
  TrainParams p;
  p.d_sub = 5;
  CHECK_THROWS_AS(train(x, {0, 1, 0, 1}, p), std::invalid_argument);
}
