#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace appsteg {

/// Fisher linear discriminant: w = (S_w + lambda I)^-1 (mu1 - mu0), with
/// S_w the sum of the two (unbiased) class covariances, and the threshold at
/// the projected class-mean midpoint.
struct FldFit {
  Eigen::VectorXd w;
  double bias = 0.0;
  double lambda = 0.0;  // regularization actually used
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rows are samples. With no lambda the default is 1e-6 * trace(S_w) / d.
/// A failed Cholesky factorization retries with lambda x10, up to 3 times.
FldFit fit_fld(const Eigen::MatrixXd& cover_rows, const Eigen::MatrixXd& stego_rows,
               std::optional<double> lambda = std::nullopt);

struct BaseLearner {
  std::vector<int> subspace;  // sorted, unique
  Eigen::VectorXd w;
  double bias = 0.0;

  /// +1 for stego, -1 for cover.
  template <typename Row>
  int vote(const Row& x) const {
    double s = -bias;
    for (std::size_t k = 0; k < subspace.size(); ++k) s += w[static_cast<Eigen::Index>(k)] * x[subspace[k]];
    return s > 0 ? 1 : -1;
  }
};

struct EnsembleModel {
  std::vector<BaseLearner> learners;  // odd count
  int d_sub = 0;
  int feature_dim = 0;
  std::uint64_t training_seed = 0;
  double oob_error = 0.0;
};

struct TrainParams {
  /// Learner count (made odd). Unset: grow in steps of 2 up to 101 until the
  /// OOB error improves by less than 0.005 over the last 10 learners.
  std::optional<int> n_learners;
  /// Subspace size. Unset: best OOB error over {2^k : 8 <= 2^k <= dim/2}.
  std::optional<int> d_sub;
  std::optional<double> lambda;
  std::uint64_t seed = 0;
  int threads = 1;
};

inline constexpr int kMaxLearners = 101;
inline constexpr double kLearnerStopImprovement = 0.005;
inline constexpr int kLearnerStopWindow = 10;

/// labels: 0 cover, 1 stego; one per row of `features`.
EnsembleModel train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                    const TrainParams& params);

/// Majority vote per row; 1 = stego.
std::vector<int> predict(const EnsembleModel& model, const Eigen::MatrixXd& rows);

std::string model_to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const EnsembleModel& model);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace appsteg
