#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mwsp/features.hpp"

namespace mwsp {

/// Marginal residual allowed on a returned transport plan.
inline constexpr double kFeasibilityTolerance = 1e-9;

struct Flow {
  std::size_t source = 0;
  std::size_t sink = 0;
  double mass = 0.0;
};

/// Positive flows of a basic optimal solution under uniform marginals.
struct TransportPlan {
  std::size_t sources = 0;
  std::size_t sinks = 0;
  std::vector<Flow> flows;
  double objective = 0.0;
  std::size_t pivots = 0;

  /// Largest deviation of any row sum from 1/sources or column sum from 1/sinks.
  double max_marginal_residual() const;
};

struct W1Result {
  double distance = 0.0;
  TransportPlan plan;
};

/// Euclidean distance between two rows of the same column space.
double ground_distance(const SparseRow& x, const SparseRow& y);

Eigen::MatrixXd ground_cost_matrix(std::span<const SparseRow> xs, std::span<const SparseRow> ys);

/// Exact minimum-cost transport between uniform distributions over the rows
/// and columns of `cost`, by the network simplex method on the complete
/// bipartite graph. Flows are carried as integers scaled by rows*cols, so
/// marginals hold exactly before the final division.
TransportPlan solve_transport(const Eigen::MatrixXd& cost);

/// 1-Wasserstein distance between two non-empty sets of feature rows.
W1Result solve_w1(std::span<const SparseRow> xs, std::span<const SparseRow> ys);

/// "source<TAB>sink<TAB>mass" per positive flow.
void write_plan_dump(std::ostream& out, const TransportPlan& plan);

}  // namespace mwsp
