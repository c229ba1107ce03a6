#pragma once

// Reference implementations used to check the production code paths. They
// share no algorithmic code with the library: the transport oracle is a
// dense tableau LP, distances come from Floyd-Warshall, and so on.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mwsp/features.hpp"
#include "mwsp/graph.hpp"
#include "mwsp/paths.hpp"

namespace mwsp::oracle {

/// Largest |X| * |Y| the brute-force transport oracle accepts.
inline constexpr std::size_t kMaxOracleCells = 64;

/// Minimum of c^T x subject to A x = b, x >= 0 (b >= 0) by a two-phase dense
/// tableau simplex with Bland's rule.
double dense_lp_minimum(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

/// Uniform-marginal transport on an explicit cost matrix via dense_lp_minimum.
double transport_lp(const Eigen::MatrixXd& cost);

/// W1 between row sets with the cost recomputed from dense vectors.
/// Throws PreconditionError when |X| * |Y| > kMaxOracleCells.
double w1_bruteforce(std::span<const SparseRow> xs, std::span<const SparseRow> ys);

/// All-pairs hop distances by Floyd-Warshall; -1 for disconnected pairs.
std::vector<std::vector<int>> all_pairs_distances(const Graph& graph);

struct RootedTree {
  std::vector<Label> labels;
  std::vector<std::size_t> parent;  ///< parent[0] unused; parent[i] < i
  std::vector<std::vector<std::size_t>> children() const;
  std::size_t size() const { return labels.size(); }
};

RootedTree random_rooted_tree(std::mt19937_64& rng, std::size_t max_nodes, Label alphabet);

/// Exhaustive rooted labeled-tree isomorphism (tries every child matching).
bool isomorphic(const RootedTree& a, const RootedTree& b);

/// BfsTree view of a rooted tree whose members are visited in `order`
/// (order[0] must be 0; parents must precede children). Node ids equal tree
/// positions, so the tree's labels index directly.
BfsTree as_bfs_tree(const RootedTree& tree, std::span<const std::size_t> order);

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& symmetric, double tol = 1e-12);

/// Dual soft-margin SVM objective minimum by a log-barrier Newton method.
struct QpSolution {
  Eigen::VectorXd alpha;
  double objective = 0.0;
};
QpSolution svm_dual_barrier(const Eigen::MatrixXd& gram, std::span<const int> labels, double C);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  std::size_t transport_instances = 200;
  std::size_t max_rows = 8;
  std::size_t tree_samples = 1000;
  std::uint64_t seed = 1;
  /// Distance used to build the costs handed to the production solver.
  std::function<double(const SparseRow&, const SparseRow&)> ground_distance;
  /// Optional dataset for the row-sum identity check (a small random set is used otherwise).
  const GraphDataset* dataset = nullptr;
};

/// Transport equivalence, feature-map row-sum identity and canonical-hash
/// injectivity. Throws PreconditionError if max_rows^2 exceeds kMaxOracleCells.
std::vector<Check> run_suite(const SuiteOptions& options);

struct TransportStats {
  std::size_t instances = 0;
  double max_value_error = 0.0;
  double max_marginal_residual = 0.0;
  std::string failure;
};
TransportStats check_transport(std::size_t instances, std::size_t max_rows, std::uint64_t seed,
                               const std::function<double(const SparseRow&, const SparseRow&)>& ground);

struct TreeStats {
  std::size_t trees = 0;
  std::size_t pairs = 0;
  std::size_t isomorphic_pairs = 0;
  std::size_t mismatches = 0;
  std::size_t shuffle_failures = 0;
};
TreeStats check_canonical_trees(std::size_t samples, std::uint64_t seed);

/// Returns the number of graphs whose summed node rows differ from the
/// graph vector, over (d, k) in the given list.
std::size_t count_row_sum_violations(const GraphDataset& dataset,
                                     std::span<const std::pair<std::size_t, std::size_t>> dk, unsigned jobs = 1);

/// Random connected-or-not labeled graph, for property tests.
Graph random_graph(std::mt19937_64& rng, std::size_t nodes, double edge_probability, Label alphabet);
/// Random tree (connected, acyclic) with labels in 1..alphabet.
Graph random_tree_graph(std::mt19937_64& rng, std::size_t nodes, Label alphabet);
/// The same graph with node ids permuted by `perm` (new id of old node v is perm[v]).
Graph permute(const Graph& graph, std::span<const NodeId> perm);

}  // namespace mwsp::oracle
