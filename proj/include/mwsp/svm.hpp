#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mwsp {

/// Symmetric asymmetry tolerated by spectrum_clip.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Projects a symmetric matrix onto the PSD cone by zeroing its negative
/// eigenvalues. Throws PreconditionError if |K - K^T| exceeds kSymmetryTolerance.
Eigen::MatrixXd spectrum_clip(const Eigen::MatrixXd& gram);

struct SvmParams {
  double C = 1.0;
  /// Stop once the maximal KKT violation m(a) - M(a) drops below this.
  double tolerance = 1e-3;
  std::size_t max_iterations = 1'000'000;
};

/// Binary soft-margin SVM trained on a precomputed kernel.
struct SvmModel {
  std::vector<double> alpha;  ///< one per training row, 0 <= alpha <= C
  std::vector<int> labels;    ///< +1 / -1 per training row
  std::vector<std::size_t> support;
  std::vector<double> dual_coef;  ///< alpha_i * y_i for each support index
  double bias = 0.0;
  double C = 0.0;
  double objective = 0.0;  ///< 0.5 a^T Q a - sum(a)
  double kkt_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Sequential minimal optimization with second-order working-set selection.
/// `labels` must be +1/-1 and contain both signs.
SvmModel train_csvm(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmParams& params);

/// Decision values for rows of `cross_gram` (test x train).
std::vector<double> decision_values(const SvmModel& model, const Eigen::MatrixXd& cross_gram);

/// sign of the decision value; an exact zero maps to +1.
std::vector<int> predict(const SvmModel& model, const Eigen::MatrixXd& cross_gram);

/// One binary model per unordered class pair, majority vote with ties going
/// to the smallest class id. Classes are those present in the training labels.
class OneVsOne {
 public:
  OneVsOne(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmParams& params);

  const std::vector<int>& classes() const { return classes_; }
  std::size_t model_count() const { return models_.size(); }
  /// Vote counts per test row, ordered like classes().
  std::vector<std::vector<std::size_t>> votes(const Eigen::MatrixXd& cross_gram) const;
  std::vector<int> predict(const Eigen::MatrixXd& cross_gram) const;

 private:
  struct PairModel {
    std::size_t first, second;  ///< positions in classes_; `first` is the +1 side
    std::vector<std::size_t> rows;
    SvmModel model;
  };
  std::size_t train_size_ = 0;
  std::vector<int> classes_;
  std::vector<PairModel> models_;
};

/// Rows and columns of `m` picked by the two index lists.
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, std::span<const std::size_t> rows,
                          std::span<const std::size_t> cols);

}  // namespace mwsp
