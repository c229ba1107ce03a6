#include "mwsp/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "mwsp/error.hpp"

namespace mwsp {

double ground_distance(const SparseRow& x, const SparseRow& y) {
  if (x.width() != y.width()) {
    throw DimensionError("ground_distance: widths " + std::to_string(x.width()) + " and " +
                         std::to_string(y.width()) + " differ");
  }
  const auto a = x.entries(), b = y.entries();
  std::size_t i = 0, j = 0;
  double sum = 0.0;
  while (i < a.size() || j < b.size()) {
    double diff;
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      diff = static_cast<double>(a[i++].second);
    } else if (i == a.size() || b[j].first < a[i].first) {
      diff = static_cast<double>(b[j++].second);
    } else {
      diff = static_cast<double>(a[i].second) - static_cast<double>(b[j].second);
      ++i;
      ++j;
    }
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

Eigen::MatrixXd ground_cost_matrix(std::span<const SparseRow> xs, std::span<const SparseRow> ys) {
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) cost(i, j) = ground_distance(xs[i], ys[j]);
  return cost;
}

double TransportPlan::max_marginal_residual() const {
  std::vector<double> row(sources, 0.0), col(sinks, 0.0);
  for (const auto& f : flows) {
    row[f.source] += f.mass;
    col[f.sink] += f.mass;
  }
  double worst = 0.0;
  for (double r : row) worst = std::max(worst, std::abs(r - 1.0 / static_cast<double>(sources)));
  for (double c : col) worst = std::max(worst, std::abs(c - 1.0 / static_cast<double>(sinks)));
  return worst;
}

namespace {

// Transportation-problem form of the network simplex. Tree nodes 0..m-1 are
// sources, m..m+n-1 are sinks; every basic cell (i, j) is a tree edge.
class TransportSimplex {
 public:
  explicit TransportSimplex(const Eigen::MatrixXd& cost)
      : cost_(cost), m_(static_cast<std::size_t>(cost.rows())), n_(static_cast<std::size_t>(cost.cols())),
        flow_(m_ * n_, 0), basic_(m_ * n_, false), u_(m_), v_(n_) {}

  TransportPlan solve() {
    northwest_corner();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < cost_.size(); ++i) scale = std::max(scale, std::abs(cost_.data()[i]));
    const double eps = 1e-12 * (1.0 + scale);
    // Generous cap; Bland's rule guarantees termination well below it.
    const std::size_t max_pivots = 1000 * (m_ + n_) * (m_ + n_) + 10000;

    std::size_t degenerate_run = 0;
    std::size_t pivots = 0;
    for (;; ++pivots) {
      if (pivots > max_pivots) throw InternalError("network simplex exceeded its pivot limit");
      build_tree();
      compute_potentials();
      const bool bland = degenerate_run > m_ + n_;
      const auto entering = price(eps, bland);
      if (entering == kNone) break;
      degenerate_run = pivot(entering) ? 0 : degenerate_run + 1;
    }

    TransportPlan plan;
    plan.sources = m_;
    plan.sinks = n_;
    plan.pivots = pivots;
    const double total = static_cast<double>(m_) * static_cast<double>(n_);
    double objective = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const auto f = flow_[i * n_ + j];
        if (f <= 0) continue;
        const double mass = static_cast<double>(f) / total;
        plan.flows.push_back({i, j, mass});
        objective += static_cast<double>(f) * cost_(i, j);
      }
    }
    plan.objective = objective / total;
    return plan;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  // Source i supplies n units, sink j demands m units.
  void northwest_corner() {
    std::vector<std::int64_t> supply(m_, static_cast<std::int64_t>(n_));
    std::vector<std::int64_t> demand(n_, static_cast<std::int64_t>(m_));
    std::size_t i = 0, j = 0;
    while (i < m_ && j < n_) {
      const auto amount = std::min(supply[i], demand[j]);
      flow_[i * n_ + j] = amount;
      basic_[i * n_ + j] = true;
      basis_.push_back(i * n_ + j);
      supply[i] -= amount;
      demand[j] -= amount;
      if (supply[i] == 0 && i + 1 < m_) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void build_tree() {
    tree_.assign(m_ + n_, {});
    for (auto cell : basis_) {
      const auto i = cell / n_, j = cell % n_;
      tree_[i].push_back(cell);
      tree_[m_ + j].push_back(cell);
    }
  }

  std::size_t other_end(std::size_t node, std::size_t cell) const {
    return node < m_ ? m_ + cell % n_ : cell / n_;
  }

  void compute_potentials() {
    std::vector<bool> done(m_ + n_, false);
    std::vector<std::size_t> stack{0};
    u_[0] = 0.0;
    done[0] = true;
    while (!stack.empty()) {
      const auto node = stack.back();
      stack.pop_back();
      for (auto cell : tree_[node]) {
        const auto next = other_end(node, cell);
        if (done[next]) continue;
        done[next] = true;
        const double c = cost_(cell / n_, cell % n_);
        if (next < m_) {
          u_[next] = c - v_[cell % n_];
        } else {
          v_[next - m_] = c - u_[cell / n_];
        }
        stack.push_back(next);
      }
    }
  }

  std::size_t price(double eps, bool bland) const {
    std::size_t best = kNone;
    double best_reduced = -eps;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const auto cell = i * n_ + j;
        if (basic_[cell]) continue;
        const double reduced = cost_(i, j) - u_[i] - v_[j];
        if (reduced < best_reduced) {
          if (bland) return cell;
          best_reduced = reduced;
          best = cell;
        }
      }
    }
    return best;
  }

  // Tree path of cells from `from` to `to`.
  std::vector<std::size_t> tree_path(std::size_t from, std::size_t to) const {
    std::vector<std::size_t> via(m_ + n_, kNone);
    std::vector<bool> seen(m_ + n_, false);
    std::vector<std::size_t> queue{from};
    seen[from] = true;
    for (std::size_t head = 0; head < queue.size() && !seen[to]; ++head) {
      const auto node = queue[head];
      for (auto cell : tree_[node]) {
        const auto next = other_end(node, cell);
        if (seen[next]) continue;
        seen[next] = true;
        via[next] = cell;
        queue.push_back(next);
      }
    }
    std::vector<std::size_t> cells;
    for (auto node = to; node != from;) {
      const auto cell = via[node];
      cells.push_back(cell);
      node = other_end(node, cell);
    }
    std::reverse(cells.begin(), cells.end());
    return cells;
  }

  // Returns true when the pivot moved a positive amount of flow.
  bool pivot(std::size_t entering) {
    const auto i = entering / n_, j = entering % n_;
    // Cycle: entering (+), then the path from sink j back to source i with
    // alternating signs starting at (-).
    const auto path = tree_path(m_ + j, i);
    std::int64_t theta = std::numeric_limits<std::int64_t>::max();
    std::size_t leaving = kNone;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const auto f = flow_[path[p]];
      if (f < theta || (f == theta && path[p] < leaving)) {
        theta = f;
        leaving = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) flow_[path[p]] += (p % 2 == 0) ? -theta : theta;
    flow_[entering] += theta;
    basic_[leaving] = false;
    basic_[entering] = true;
    *std::find(basis_.begin(), basis_.end(), leaving) = entering;
    return theta > 0;
  }

  const Eigen::MatrixXd& cost_;
  std::size_t m_, n_;
  std::vector<std::int64_t> flow_;
  std::vector<bool> basic_;
  std::vector<std::size_t> basis_;
  std::vector<std::vector<std::size_t>> tree_;
  std::vector<double> u_, v_;
};

}  // namespace

TransportPlan solve_transport(const Eigen::MatrixXd& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) throw PreconditionError("transport problem needs non-empty marginals");
  for (Eigen::Index i = 0; i < cost.size(); ++i) {
    const double c = cost.data()[i];
    if (!std::isfinite(c) || c < 0) throw PreconditionError("transport costs must be finite and non-negative");
  }
  return TransportSimplex(cost).solve();
}

W1Result solve_w1(std::span<const SparseRow> xs, std::span<const SparseRow> ys) {
  if (xs.empty() || ys.empty()) throw PreconditionError("solve_w1: both row sets must be non-empty");
  auto plan = solve_transport(ground_cost_matrix(xs, ys));
  const double distance = plan.objective;
  return {distance, std::move(plan)};
}

void write_plan_dump(std::ostream& out, const TransportPlan& plan) {
  for (const auto& f : plan.flows) out << f.source << '\t' << f.sink << '\t' << f.mass << '\n';
}

}  // namespace mwsp
