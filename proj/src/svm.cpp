#include "mwsp/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "mwsp/error.hpp"

namespace mwsp {

Eigen::MatrixXd spectrum_clip(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols()) throw DimensionError("spectrum_clip: matrix is not square");
  if (gram.size() > 0 && (gram - gram.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw PreconditionError("spectrum_clip: matrix is not symmetric");
  }
  if (gram.size() == 0) return gram;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw InternalError("spectrum_clip: eigendecomposition failed");
  const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, std::span<const std::size_t> rows,
                          std::span<const std::size_t> cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

namespace {

// Dual soft-margin solver following the working-set selection of Fan, Chen
// and Lin (second-order information), without shrinking.
class Smo {
 public:
  Smo(const Eigen::MatrixXd& gram, std::span<const int> y, const SvmParams& params)
      : k_(gram), y_(y.begin(), y.end()), c_(params.C), eps_(params.tolerance),
        max_iter_(params.max_iterations), n_(y.size()), alpha_(n_, 0.0), grad_(n_, -1.0) {}

  SvmModel run() {
    SvmModel model;
    std::size_t iter = 0;
    double gap = 0.0;
    bool converged = false;
    for (; iter < max_iter_; ++iter) {
      std::size_t i = 0, j = 0;
      if (select(i, j, gap)) {
        converged = true;
        break;
      }
      update(i, j);
    }
    if (!converged) {
      std::size_t i, j;
      converged = select(i, j, gap);
    }
    model.alpha = alpha_;
    model.labels = y_;
    model.C = c_;
    model.iterations = iter;
    model.kkt_gap = gap;
    model.converged = converged;
    model.bias = -rho();
    double obj = 0.0;
    for (std::size_t t = 0; t < n_; ++t) obj += alpha_[t] * (grad_[t] - 1.0);
    model.objective = 0.5 * obj;
    for (std::size_t t = 0; t < n_; ++t) {
      if (alpha_[t] > 0.0) {
        model.support.push_back(t);
        model.dual_coef.push_back(alpha_[t] * y_[t]);
      }
    }
    return model;
  }

 private:
  double q(std::size_t a, std::size_t b) const { return y_[a] * y_[b] * k_(a, b); }
  bool upper(std::size_t t) const { return alpha_[t] >= c_; }
  bool lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  // Returns true when the KKT gap is below tolerance.
  bool select(std::size_t& out_i, std::size_t& out_j, double& gap) const {
    constexpr double kTau = 1e-12;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t i = n_;
    for (std::size_t t = 0; t < n_; ++t) {
      if (y_[t] == 1 ? !upper(t) : !lower(t)) {
        if (-y_[t] * grad_[t] >= gmax) {
          gmax = -y_[t] * grad_[t];
          i = t;
        }
      }
    }
    std::size_t j = n_;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n_; ++t) {
      if (y_[t] == 1 ? lower(t) : upper(t)) continue;
      const double ygt = y_[t] * grad_[t];
      gmax2 = std::max(gmax2, ygt);
      if (i == n_) continue;
      const double diff = gmax + ygt;
      if (diff > 0) {
        double quad = k_(i, i) + k_(t, t) - 2.0 * k_(i, t);
        if (quad <= 0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    out_i = i;
    out_j = j;
    return i == n_ || j == n_ || gap < eps_;
  }

  void update(std::size_t i, std::size_t j) {
    constexpr double kTau = 1e-12;
    const double old_ai = alpha_[i], old_aj = alpha_[j];
    const double kii = k_(i, i), kjj = k_(j, j), kij = k_(i, j);
    if (y_[i] != y_[j]) {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = alpha_[i] - alpha_[j];
      alpha_[i] += delta;
      alpha_[j] += delta;
      if (diff > 0) {
        if (alpha_[j] < 0) {
          alpha_[j] = 0;
          alpha_[i] = diff;
        }
      } else if (alpha_[i] < 0) {
        alpha_[i] = 0;
        alpha_[j] = -diff;
      }
      if (diff > 0) {
        if (alpha_[i] > c_) {
          alpha_[i] = c_;
          alpha_[j] = c_ - diff;
        }
      } else if (alpha_[j] > c_) {
        alpha_[j] = c_;
        alpha_[i] = c_ + diff;
      }
    } else {
      double quad = kii + kjj - 2.0 * kij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = alpha_[i] + alpha_[j];
      alpha_[i] -= delta;
      alpha_[j] += delta;
      if (sum > c_) {
        if (alpha_[i] > c_) {
          alpha_[i] = c_;
          alpha_[j] = sum - c_;
        }
      } else if (alpha_[j] < 0) {
        alpha_[j] = 0;
        alpha_[i] = sum;
      }
      if (sum > c_) {
        if (alpha_[j] > c_) {
          alpha_[j] = c_;
          alpha_[i] = sum - c_;
        }
      } else if (alpha_[i] < 0) {
        alpha_[i] = 0;
        alpha_[j] = sum;
      }
    }
    const double di = alpha_[i] - old_ai, dj = alpha_[j] - old_aj;
    for (std::size_t t = 0; t < n_; ++t) grad_[t] += q(t, i) * di + q(t, j) * dj;
  }

  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t free = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double yg = y_[t] * grad_[t];
      if (upper(t)) {
        if (y_[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (lower(t)) {
        if (y_[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++free;
        sum += yg;
      }
    }
    return free > 0 ? sum / static_cast<double>(free) : 0.5 * (ub + lb);
  }

  const Eigen::MatrixXd& k_;
  std::vector<int> y_;
  double c_, eps_;
  std::size_t max_iter_, n_;
  std::vector<double> alpha_, grad_;
};

}  // namespace

SvmModel train_csvm(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmParams& params) {
  if (gram.rows() != gram.cols() || static_cast<std::size_t>(gram.rows()) != labels.size()) {
    throw DimensionError("train_csvm: gram is " + std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) +
                         " for " + std::to_string(labels.size()) + " labels");
  }
  if (!(params.C > 0.0)) throw PreconditionError("train_csvm: C must be positive");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == -1) neg = true;
    else throw PreconditionError("train_csvm: labels must be +1 or -1");
  }
  if (!pos || !neg) throw PreconditionError("train_csvm: training data holds a single class");
  return Smo(gram, labels, params).run();
}

std::vector<double> decision_values(const SvmModel& model, const Eigen::MatrixXd& cross_gram) {
  if (static_cast<std::size_t>(cross_gram.cols()) != model.alpha.size()) {
    throw DimensionError("decision_values: expected " + std::to_string(model.alpha.size()) + " columns, got " +
                         std::to_string(cross_gram.cols()));
  }
  std::vector<double> out(static_cast<std::size_t>(cross_gram.rows()), model.bias);
  for (Eigen::Index r = 0; r < cross_gram.rows(); ++r) {
    for (std::size_t s = 0; s < model.support.size(); ++s) {
      out[r] += model.dual_coef[s] * cross_gram(r, static_cast<Eigen::Index>(model.support[s]));
    }
  }
  return out;
}

std::vector<int> predict(const SvmModel& model, const Eigen::MatrixXd& cross_gram) {
  const auto values = decision_values(model, cross_gram);
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v >= 0.0 ? 1 : -1);
  return out;
}

OneVsOne::OneVsOne(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmParams& params)
    : train_size_(labels.size()), classes_(labels.begin(), labels.end()) {
  if (static_cast<std::size_t>(gram.rows()) != labels.size() || gram.rows() != gram.cols()) {
    throw DimensionError("OneVsOne: gram does not match label count");
  }
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
  for (std::size_t a = 0; a < classes_.size(); ++a) {
    for (std::size_t b = a + 1; b < classes_.size(); ++b) {
      PairModel pm{a, b, {}, {}};
      std::vector<int> y;
      for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] == classes_[a] || labels[t] == classes_[b]) {
          pm.rows.push_back(t);
          y.push_back(labels[t] == classes_[a] ? 1 : -1);
        }
      }
      pm.model = train_csvm(submatrix(gram, pm.rows, pm.rows), y, params);
      models_.push_back(std::move(pm));
    }
  }
}

std::vector<std::vector<std::size_t>> OneVsOne::votes(const Eigen::MatrixXd& cross_gram) const {
  if (static_cast<std::size_t>(cross_gram.cols()) != train_size_) {
    throw DimensionError("OneVsOne: expected " + std::to_string(train_size_) + " columns");
  }
  const auto rows = static_cast<std::size_t>(cross_gram.rows());
  std::vector<std::vector<std::size_t>> out(rows, std::vector<std::size_t>(classes_.size(), 0));
  if (classes_.size() == 1) {
    for (auto& v : out) v[0] = 1;
    return out;
  }
  std::vector<std::size_t> all_rows(rows);
  for (std::size_t r = 0; r < rows; ++r) all_rows[r] = r;
  for (const auto& pm : models_) {
    const auto pred = mwsp::predict(pm.model, submatrix(cross_gram, all_rows, pm.rows));
    for (std::size_t r = 0; r < rows; ++r) ++out[r][pred[r] == 1 ? pm.first : pm.second];
  }
  return out;
}

std::vector<int> OneVsOne::predict(const Eigen::MatrixXd& cross_gram) const {
  const auto counts = votes(cross_gram);
  std::vector<int> out;
  out.reserve(counts.size());
  for (const auto& c : counts) {
    const auto best = std::max_element(c.begin(), c.end()) - c.begin();  // first maximum = smallest id
    out.push_back(classes_[static_cast<std::size_t>(best)]);
  }
  return out;
}

}  // namespace mwsp
