#include "appsteg/ensemble.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "appsteg/parallel.hpp"
#include "appsteg/prng.hpp"

namespace appsteg {

namespace {

Eigen::MatrixXd class_scatter(const Eigen::MatrixXd& rows, const Eigen::RowVectorXd& mean) {
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows.cols(), rows.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s / static_cast<double>(rows.rows() - 1);
}

}  // namespace

FldFit fit_fld(const Eigen::MatrixXd& cover_rows, const Eigen::MatrixXd& stego_rows,
               std::optional<double> lambda) {
  if (cover_rows.rows() < 2 || stego_rows.rows() < 2)
    throw std::invalid_argument("fit_fld needs at least two rows per class");
  if (cover_rows.cols() != stego_rows.cols())
    throw std::invalid_argument("fit_fld class column counts differ");
  const Eigen::Index d = cover_rows.cols();

  const Eigen::RowVectorXd mu0 = cover_rows.colwise().mean();
  const Eigen::RowVectorXd mu1 = stego_rows.colwise().mean();
  const Eigen::MatrixXd sw = class_scatter(cover_rows, mu0) + class_scatter(stego_rows, mu1);

  double lam = lambda.value_or(1e-6 * sw.trace() / static_cast<double>(d));
  if (lam < 0) throw std::invalid_argument("lambda must be non-negative");
  const double floor_lam = 1e-12 * std::max(sw.trace() / static_cast<double>(d), 1e-300);

  const Eigen::VectorXd diff = (mu1 - mu0).transpose();
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Eigen::MatrixXd a = sw;
    a.diagonal().array() += lam;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      FldFit fit;
      fit.w = llt.solve(diff);
      if (fit.w.allFinite()) {
        fit.bias = fit.w.dot(0.5 * (mu0 + mu1).transpose());
        fit.lambda = lam;
        return fit;
      }
    }
    lam = std::max(lam * 10.0, floor_lam);
  }
  throw FitError("within-class scatter is singular even after regularization");
}

namespace {

struct Grown {
  std::vector<BaseLearner> learners;
  double oob_error = 0.0;
};

double oob_error_of(const std::vector<int>& stego_votes, const std::vector<int>& total_votes,
                    const std::vector<int>& labels) {
  double errors = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (total_votes[i] == 0) continue;
    ++counted;
    const int twice = 2 * stego_votes[i];
    if (twice == total_votes[i])
      errors += 0.5;
    else if ((twice > total_votes[i] ? 1 : 0) != labels[i])
      errors += 1.0;
  }
  return counted ? errors / static_cast<double>(counted) : 0.5;
}

// Bootstrap within each class, random subspace, FLD, OOB votes. Learner k
// draws from its own PRNG stream so results do not depend on grid order.
Grown grow(const Eigen::MatrixXd& x, const std::vector<int>& labels,
           const std::vector<int>& by_class0, const std::vector<int>& by_class1, int d_sub,
           const TrainParams& params) {
  const int dim = static_cast<int>(x.cols());
  const std::size_t n = labels.size();
  std::vector<int> stego_votes(n, 0), total_votes(n, 0);
  std::vector<double> history;  // OOB error after each learner
  Grown out;

  const int fixed = params.n_learners ? std::max(1, *params.n_learners | 1) : 0;
  const int limit = fixed ? fixed : kMaxLearners;
  std::vector<int> features(static_cast<std::size_t>(dim));
  std::vector<char> in_bag(n);

  for (int k = 0; k < limit; ++k) {
    Prng rng(mix_seed(params.seed, static_cast<std::uint64_t>(k)));
    std::fill(in_bag.begin(), in_bag.end(), 0);
    auto draw = [&](const std::vector<int>& pool) {
      std::vector<int> rows(pool.size());
      for (auto& r : rows) {
        r = pool[rng.uniform(pool.size())];
        in_bag[static_cast<std::size_t>(r)] = 1;
      }
      return rows;
    };
    const std::vector<int> boot0 = draw(by_class0);
    const std::vector<int> boot1 = draw(by_class1);

    std::iota(features.begin(), features.end(), 0);
    for (int i = 0; i < d_sub; ++i)
      std::swap(features[static_cast<std::size_t>(i)],
                features[static_cast<std::size_t>(i) + rng.uniform(static_cast<std::uint64_t>(dim - i))]);
    std::vector<int> subspace(features.begin(), features.begin() + d_sub);
    std::sort(subspace.begin(), subspace.end());

    auto gather = [&](const std::vector<int>& rows) {
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), d_sub);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < d_sub; ++c)
          m(static_cast<Eigen::Index>(r), c) = x(rows[r], subspace[static_cast<std::size_t>(c)]);
      return m;
    };
    const FldFit fit = fit_fld(gather(boot0), gather(boot1), params.lambda);
    BaseLearner learner{std::move(subspace), fit.w, fit.bias};

    for (std::size_t i = 0; i < n; ++i) {
      if (in_bag[i]) continue;
      ++total_votes[i];
      if (learner.vote(x.row(static_cast<Eigen::Index>(i))) > 0) ++stego_votes[i];
    }
    out.learners.push_back(std::move(learner));
    history.push_back(oob_error_of(stego_votes, total_votes, labels));

    const int count = k + 1;
    if (!fixed && count % 2 == 1 && count > kLearnerStopWindow) {
      const double gain = history[static_cast<std::size_t>(count - 1 - kLearnerStopWindow)] - history.back();
      if (gain < kLearnerStopImprovement) break;
    }
  }
  out.oob_error = history.back();
  return out;
}

}  // namespace

EnsembleModel train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                    const TrainParams& params) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw std::invalid_argument("feature rows and labels differ in count");
  std::vector<int> c0, c1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) c0.push_back(static_cast<int>(i));
    else if (labels[i] == 1) c1.push_back(static_cast<int>(i));
    else throw std::invalid_argument("labels must be 0 or 1");
  }
  if (c0.size() < 2 || c1.size() < 2)
    throw std::invalid_argument("training needs at least two rows of each class");
  const double ratio = static_cast<double>(c0.size()) / static_cast<double>(c1.size());
  if (ratio < 1.0 / 1.1 || ratio > 1.1)
    std::clog << "warning: unbalanced training set (" << c0.size() << " covers, " << c1.size()
              << " stegos)\n";

  const int dim = static_cast<int>(features.cols());
  std::vector<int> grid;
  if (params.d_sub) {
    if (*params.d_sub < 1 || *params.d_sub > dim) throw std::invalid_argument("d_sub out of range");
    grid.push_back(*params.d_sub);
  } else {
    for (int d = 8; 2 * d <= dim; d *= 2) grid.push_back(d);
    if (grid.empty()) grid.push_back(dim);
  }

  std::vector<Grown> results(grid.size());
  parallel_for(grid.size(), params.threads, [&](std::size_t g) {
    results[g] = grow(features, labels, c0, c1, grid[g], params);
  });

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (results[g].oob_error < results[best].oob_error) best = g;

  EnsembleModel model;
  model.learners = std::move(results[best].learners);
  model.d_sub = grid[best];
  model.feature_dim = dim;
  model.training_seed = params.seed;
  model.oob_error = results[best].oob_error;
  // An even count only arises from a fixed odd request, so this is a guard.
  if (model.learners.size() % 2 == 0) model.learners.pop_back();
  return model;
}

std::vector<int> predict(const EnsembleModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.feature_dim)
    throw std::invalid_argument("feature width " + std::to_string(rows.cols()) +
                                " does not match model dimension " +
                                std::to_string(model.feature_dim));
  std::vector<int> out(static_cast<std::size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    int sum = 0;
    for (const BaseLearner& l : model.learners) sum += l.vote(rows.row(i));
    out[static_cast<std::size_t>(i)] = sum > 0 ? 1 : 0;
  }
  return out;
}

std::string model_to_json(const EnsembleModel& model) {
  nlohmann::json learners = nlohmann::json::array();
  for (const BaseLearner& l : model.learners) {
    learners.push_back({{"subspace", l.subspace},
                        {"w", std::vector<double>(l.w.data(), l.w.data() + l.w.size())},
                        {"bias", l.bias}});
  }
  nlohmann::json doc = {{"learners", learners},
                        {"d_sub", model.d_sub},
                        {"feature_dim", model.feature_dim},
                        {"training_seed", model.training_seed},
                        {"oob_error", model.oob_error}};
  return doc.dump() + "\n";
}

EnsembleModel model_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  EnsembleModel model;
  model.d_sub = doc.at("d_sub").get<int>();
  model.feature_dim = doc.at("feature_dim").get<int>();
  model.training_seed = doc.at("training_seed").get<std::uint64_t>();
  model.oob_error = doc.at("oob_error").get<double>();
  for (const auto& l : doc.at("learners")) {
    BaseLearner learner;
    learner.subspace = l.at("subspace").get<std::vector<int>>();
    const auto w = l.at("w").get<std::vector<double>>();
    learner.w = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    learner.bias = l.at("bias").get<double>();
    if (learner.subspace.size() != w.size())
      throw std::invalid_argument("learner subspace and weight sizes differ");
    for (int idx : learner.subspace)
      if (idx < 0 || idx >= model.feature_dim)
        throw std::invalid_argument("learner subspace index outside feature dimension");
    model.learners.push_back(std::move(learner));
  }
  if (model.learners.empty() || model.learners.size() % 2 == 0)
    throw std::invalid_argument("model must hold an odd number of learners");
  return model;
}

void save_model(const std::filesystem::path& path, const EnsembleModel& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << model_to_json(model);
  if (!out) throw std::runtime_error("cannot write model " + path.string());
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace appsteg
