#include "mwsp/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "mwsp/canonical.hpp"
#include "mwsp/error.hpp"
#include "mwsp/wasserstein.hpp"

namespace mwsp::oracle {

double dense_lp_minimum(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const auto rows = static_cast<std::size_t>(A.rows());
  const auto vars = static_cast<std::size_t>(A.cols());
  const std::size_t cols = vars + rows;  // structural + artificial
  constexpr double eps = 1e-10;
  // Tableau: rows x (cols + 1), last column is the right-hand side.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols + 1));
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    if (b(r) < 0) throw PreconditionError("dense_lp_minimum expects b >= 0");
    t.row(r).head(vars) = A.row(r);
    t(r, vars + r) = 1.0;
    t(r, cols) = b(r);
    basis[r] = vars + r;
  }

  auto run = [&](const Eigen::VectorXd& cost, std::size_t allowed) {
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      // Reduced costs c_j - c_B B^-1 A_j, read off the tableau.
      std::size_t entering = cols;
      for (std::size_t j = 0; j < allowed && entering == cols; ++j) {
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        double reduced = cost(j);
        for (std::size_t r = 0; r < rows; ++r) reduced -= cost(basis[r]) * t(r, j);
        if (reduced < -eps) entering = j;
      }
      if (entering == cols) return;
      std::size_t leave = rows;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows; ++r) {
        if (t(r, entering) > eps) {
          const double ratio = t(r, cols) / t(r, entering);
          if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis[r] < basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave == rows) throw InternalError("dense_lp_minimum: unbounded");
      t.row(leave) /= t(leave, entering);
      for (std::size_t r = 0; r < rows; ++r) {
        if (r != leave && t(r, entering) != 0.0) t.row(r) -= t(r, entering) * t.row(leave);
      }
      basis[leave] = entering;
    }
    throw InternalError("dense_lp_minimum: iteration limit");
  };

  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  phase1.tail(static_cast<Eigen::Index>(rows)).setOnes();
  run(phase1, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] >= vars) {
      if (t(r, cols) > 1e-8) throw PreconditionError("dense_lp_minimum: infeasible");
      // Drive the zero-level artificial out if any structural pivot exists.
      for (std::size_t j = 0; j < vars; ++j) {
        if (std::abs(t(r, j)) > eps) {
          t.row(r) /= t(r, j);
          for (std::size_t q = 0; q < rows; ++q)
            if (q != r) t.row(q) -= t(q, j) * t.row(r);
          basis[r] = j;
          break;
        }
      }
    }
  }
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  phase2.head(static_cast<Eigen::Index>(vars)) = c;
  run(phase2, vars);
  double value = 0.0;
  for (std::size_t r = 0; r < rows; ++r) value += phase2(basis[r]) * t(r, cols);
  return value;
}

double transport_lp(const Eigen::MatrixXd& cost) {
  const auto m = static_cast<std::size_t>(cost.rows()), n = static_cast<std::size_t>(cost.cols());
  // Supplies scaled by m*n: each source ships n units, each sink takes m.
  // The last sink constraint is implied by the others and omitted.
  const std::size_t constraints = m + n - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(constraints), static_cast<Eigen::Index>(m * n));
  Eigen::VectorXd b(static_cast<Eigen::Index>(constraints));
  Eigen::VectorXd c(static_cast<Eigen::Index>(m * n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto var = static_cast<Eigen::Index>(i * n + j);
      c(var) = cost(i, j);
      A(static_cast<Eigen::Index>(i), var) = 1.0;
      if (j + 1 < n) A(static_cast<Eigen::Index>(m + j), var) = 1.0;
    }
  }
  for (std::size_t i = 0; i < m; ++i) b(i) = static_cast<double>(n);
  for (std::size_t j = 0; j + 1 < n; ++j) b(m + j) = static_cast<double>(m);
  return dense_lp_minimum(A, b, c) / (static_cast<double>(m) * static_cast<double>(n));
}

double w1_bruteforce(std::span<const SparseRow> xs, std::span<const SparseRow> ys) {
  if (xs.empty() || ys.empty()) throw PreconditionError("oracle needs non-empty row sets");
  if (xs.size() * ys.size() > kMaxOracleCells) {
    throw PreconditionError("oracle refuses " + std::to_string(xs.size()) + "x" + std::to_string(ys.size()) +
                            " instances (cap " + std::to_string(kMaxOracleCells) + " cells)");
  }
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto x = xs[i].to_dense();
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const auto y = ys[j].to_dense();
      if (x.size() != y.size()) throw DimensionError("oracle rows differ in width");
      double s = 0.0;
      for (std::size_t q = 0; q < x.size(); ++q) s += (x[q] - y[q]) * (x[q] - y[q]);
      cost(i, j) = std::sqrt(s);
    }
  }
  return transport_lp(cost);
}

std::vector<std::vector<int>> all_pairs_distances(const Graph& graph) {
  const auto n = graph.node_count();
  constexpr int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t v = 0; v < n; ++v) {
    d[v][v] = 0;
    for (NodeId u : graph.neighbors(static_cast<NodeId>(v))) d[v][u] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& x : row)
      if (x >= inf) x = -1;
  return d;
}

std::vector<std::vector<std::size_t>> RootedTree::children() const {
  std::vector<std::vector<std::size_t>> out(labels.size());
  for (std::size_t i = 1; i < labels.size(); ++i) out[parent[i]].push_back(i);
  return out;
}

RootedTree random_rooted_tree(std::mt19937_64& rng, std::size_t max_nodes, Label alphabet) {
  RootedTree t;
  const auto n = 1 + rng() % max_nodes;
  t.labels.resize(n);
  t.parent.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    t.labels[i] = static_cast<Label>(1 + rng() % static_cast<std::uint64_t>(alphabet));
    if (i > 0) t.parent[i] = rng() % i;
  }
  return t;
}

namespace {

bool iso_at(const RootedTree& a, const std::vector<std::vector<std::size_t>>& ca, std::size_t u,
            const RootedTree& b, const std::vector<std::vector<std::size_t>>& cb, std::size_t v) {
  if (a.labels[u] != b.labels[v] || ca[u].size() != cb[v].size()) return false;
  std::vector<std::size_t> perm(cb[v].size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool all = true;
    for (std::size_t i = 0; i < perm.size() && all; ++i) all = iso_at(a, ca, ca[u][i], b, cb, cb[v][perm[i]]);
    if (all) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

bool isomorphic(const RootedTree& a, const RootedTree& b) {
  if (a.size() != b.size()) return false;
  return iso_at(a, a.children(), 0, b, b.children(), 0);
}

BfsTree as_bfs_tree(const RootedTree& tree, std::span<const std::size_t> order) {
  std::vector<std::size_t> position(tree.size());
  for (std::size_t p = 0; p < order.size(); ++p) position[order[p]] = p;
  BfsTree out;
  out.root = 0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const auto node = order[p];
    out.members.push_back(static_cast<NodeId>(node));
    out.parent.push_back(node == 0 ? BfsTree::kNoParent : position[tree.parent[node]]);
    out.depth.push_back(node == 0 ? 0 : out.depth[position[tree.parent[node]]] + 1);
  }
  return out;
}

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& symmetric, double tol) {
  Eigen::MatrixXd a = symmetric;
  const auto n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) < tol) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Eigen::VectorXd values = a.diagonal();
  std::sort(values.data(), values.data() + values.size());
  return values;
}

QpSolution svm_dual_barrier(const Eigen::MatrixXd& gram, std::span<const int> labels, double C) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::VectorXd y(n);
  std::size_t pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = labels[static_cast<std::size_t>(i)];
    (labels[static_cast<std::size_t>(i)] > 0 ? pos : neg)++;
  }
  const Eigen::MatrixXd Q = (y * y.transpose()).cwiseProduct(gram);
  // Strictly feasible start with y^T a = 0.
  const double m = static_cast<double>(std::max(pos, neg));
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a(i) = y(i) > 0 ? C * neg / (2 * m) : C * pos / (2 * m);

  auto f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(Q * x) - x.sum(); };
  auto barrier = [&](const Eigen::VectorXd& x, double t) {
    double v = t * f(x);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x(i) <= 0 || x(i) >= C) return std::numeric_limits<double>::infinity();
      v -= std::log(x(i)) + std::log(C - x(i));
    }
    return v;
  };
  for (double t = 1.0; 2.0 * static_cast<double>(n) / t > 1e-10; t *= 4.0) {
    for (int it = 0; it < 500; ++it) {
      Eigen::VectorXd grad = t * (Q * a - Eigen::VectorXd::Ones(n));
      Eigen::MatrixXd hess = t * Q;
      for (Eigen::Index i = 0; i < n; ++i) {
        grad(i) += -1.0 / a(i) + 1.0 / (C - a(i));
        hess(i, i) += 1.0 / (a(i) * a(i)) + 1.0 / ((C - a(i)) * (C - a(i)));
      }
      // Symmetric diagonal scaling keeps the system well conditioned when
      // some alphas sit next to a bound.
      const Eigen::VectorXd scale = hess.diagonal().cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
      kkt.topLeftCorner(n, n) = scale.asDiagonal() * hess * scale.asDiagonal();
      kkt.block(0, n, n, 1) = scale.cwiseProduct(y);
      kkt.block(n, 0, 1, n) = scale.cwiseProduct(y).transpose();
      Eigen::VectorXd rhs(n + 1);
      rhs.head(n) = -scale.cwiseProduct(grad);
      rhs(n) = 0.0;
      Eigen::VectorXd step = scale.cwiseProduct(kkt.fullPivLu().solve(rhs).head(n));
      // The solve loses accuracy near the bounds; keep y^T a = 0 exactly.
      step -= y * (y.dot(step) / y.squaredNorm());
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-13)) break;
      // Largest step keeping 0 < a < C, then backtrack on the barrier with
      // slack for roundoff (t * f is large late in the schedule).
      double s = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (step(i) < 0) s = std::min(s, 0.99 * a(i) / -step(i));
        if (step(i) > 0) s = std::min(s, 0.99 * (C - a(i)) / step(i));
      }
      const double base = barrier(a, t);
      const double slack = 1e-13 * std::abs(base);
      while (barrier(a + s * step, t) > base - 0.25 * s * decrement + slack && s > 1e-20) s *= 0.5;
      if (s <= 1e-20) break;
      a += s * step;
    }
  }
  return {a, f(a)};
}

TransportStats check_transport(std::size_t instances, std::size_t max_rows, std::uint64_t seed,
                               const std::function<double(const SparseRow&, const SparseRow&)>& ground) {
  if (max_rows * max_rows > kMaxOracleCells) {
    throw PreconditionError("oracle refuses instances with up to " + std::to_string(max_rows) + " rows (cap " +
                            std::to_string(kMaxOracleCells) + " cells)");
  }
  std::mt19937_64 rng(seed);
  TransportStats stats;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const std::size_t width = 1 + rng() % 6;
    auto rows = [&](std::size_t count) {
      std::vector<SparseRow> out;
      for (std::size_t r = 0; r < count; ++r) {
        std::vector<SparseRow::Entry> entries;
        for (std::uint32_t c = 0; c < width; ++c)
          if (rng() % 2) entries.emplace_back(c, rng() % 5);
        out.emplace_back(width, std::move(entries));
      }
      return out;
    };
    const auto xs = rows(1 + rng() % max_rows);
    const auto ys = rows(1 + rng() % max_rows);
    try {
      Eigen::MatrixXd cost(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) cost(i, j) = ground(xs[i], ys[j]);
      const auto plan = solve_transport(cost);
      const double expected = w1_bruteforce(xs, ys);
      stats.max_value_error = std::max(stats.max_value_error, std::abs(plan.objective - expected));
      stats.max_marginal_residual = std::max(stats.max_marginal_residual, plan.max_marginal_residual());
    } catch (const std::exception& e) {
      if (stats.failure.empty()) stats.failure = "instance " + std::to_string(inst) + ": " + e.what();
    }
    ++stats.instances;
  }
  return stats;
}

TreeStats check_canonical_trees(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TreeStats stats;
  std::vector<RootedTree> trees;
  std::vector<CanonString> canon;
  auto identity = [](std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    return order;
  };
  for (std::size_t s = 0; s < samples; ++s) {
    // Small sizes and a two-letter alphabet make isomorphic pairs common.
    auto tree = random_rooted_tree(rng, 1 + s % 8, 2);
    const auto order = identity(tree.size());
    auto encoded = canonical_tree_string(as_bfs_tree(tree, order), tree.labels);
    // Reorder members so every child list is visited in a different order.
    auto shuffled = order;
    for (std::size_t i = shuffled.size(); i > 2; --i) std::swap(shuffled[i - 1], shuffled[1 + rng() % (i - 1)]);
    if (canonical_tree_string(as_bfs_tree(tree, shuffled), tree.labels) != encoded) ++stats.shuffle_failures;
    trees.push_back(std::move(tree));
    canon.push_back(std::move(encoded));
  }
  stats.trees = trees.size();
  for (std::size_t a = 0; a < trees.size(); ++a) {
    for (std::size_t b = a + 1; b < trees.size(); ++b) {
      ++stats.pairs;
      const bool iso = isomorphic(trees[a], trees[b]);
      stats.isomorphic_pairs += iso;
      if (iso != (canon[a] == canon[b])) ++stats.mismatches;
    }
  }
  return stats;
}

std::size_t count_row_sum_violations(const GraphDataset& dataset,
                                     std::span<const std::pair<std::size_t, std::size_t>> dk, unsigned jobs) {
  std::size_t violations = 0;
  for (const auto& [d, k] : dk) {
    const auto features = build_features(dataset, d, k, jobs);
    for (const auto& matrix : features.matrices) {
      // Independent dense accumulation of the rows.
      std::vector<std::uint64_t> dense(matrix.width, 0);
      for (const auto& row : matrix.rows)
        for (const auto& [col, count] : row.entries()) dense[col] += count;
      const auto vec = graph_feature_map(matrix).values;
      bool same = vec.width() == matrix.width;
      for (std::uint32_t col = 0; same && col < matrix.width; ++col) same = vec.at(col) == dense[col];
      violations += !same;
    }
  }
  return violations;
}

Graph random_graph(std::mt19937_64& rng, std::size_t nodes, double edge_probability, Label alphabet) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < nodes; ++u)
    for (NodeId v = u + 1; v < nodes; ++v)
      if (coin(rng) < edge_probability) edges.emplace_back(u, v);
  std::vector<Label> labels(nodes);
  for (auto& l : labels) l = static_cast<Label>(1 + rng() % static_cast<std::uint64_t>(alphabet));
  return Graph::from_edges(nodes, edges, std::move(labels));
}

Graph random_tree_graph(std::mt19937_64& rng, std::size_t nodes, Label alphabet) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 1; v < nodes; ++v) edges.emplace_back(static_cast<NodeId>(rng() % v), v);
  std::vector<Label> labels(nodes);
  for (auto& l : labels) l = static_cast<Label>(1 + rng() % static_cast<std::uint64_t>(alphabet));
  return Graph::from_edges(nodes, edges, std::move(labels));
}

Graph permute(const Graph& graph, std::span<const NodeId> perm) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<Label> labels(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    labels[perm[v]] = graph.label(v);
    for (NodeId u : graph.neighbors(v))
      if (v < u) edges.emplace_back(perm[v], perm[u]);
  }
  return Graph::from_edges(graph.node_count(), edges, std::move(labels));
}

std::vector<Check> run_suite(const SuiteOptions& options) {
  std::vector<Check> checks;
  const auto ground = options.ground_distance ? options.ground_distance
                                              : std::function<double(const SparseRow&, const SparseRow&)>(
                                                    [](const SparseRow& a, const SparseRow& b) {
                                                      return mwsp::ground_distance(a, b);
                                                    });
  {
    const auto stats = check_transport(options.transport_instances, options.max_rows, options.seed, ground);
    std::ostringstream detail;
    detail << stats.instances << " instances, max |W1 - oracle| = " << stats.max_value_error
           << ", max marginal residual = " << stats.max_marginal_residual;
    if (!stats.failure.empty()) detail << "; " << stats.failure;
    checks.push_back({"transport-oracle", stats.failure.empty() && stats.max_value_error <= 1e-9 &&
                                              stats.max_marginal_residual <= kFeasibilityTolerance,
                      detail.str()});
  }
  {
    GraphDataset sample;
    if (!options.dataset) {
      std::mt19937_64 rng(options.seed + 7);
      sample.name = "random";
      for (int g = 0; g < 20; ++g) {
        sample.graphs.push_back(random_graph(rng, 3 + rng() % 10, 0.3, 3));
        sample.class_labels.push_back(g % 2);
      }
    }
    const auto& dataset = options.dataset ? *options.dataset : sample;
    const std::pair<std::size_t, std::size_t> dk[] = {{1, 0}, {2, 1}, {3, 2}};
    const auto bad = count_row_sum_violations(dataset, dk);
    checks.push_back({"feature-row-sum", bad == 0,
                      std::to_string(bad) + " graph/parameter combinations violate the row-sum identity"});
  }
  {
    const auto stats = check_canonical_trees(options.tree_samples, options.seed + 13);
    std::ostringstream detail;
    detail << stats.trees << " trees, " << stats.pairs << " pairs (" << stats.isomorphic_pairs
           << " isomorphic), " << stats.mismatches << " mismatches, " << stats.shuffle_failures
           << " shuffle failures";
    checks.push_back({"canonical-tree-hash", stats.mismatches == 0 && stats.shuffle_failures == 0, detail.str()});
  }
  return checks;
}

}  // namespace mwsp::oracle
