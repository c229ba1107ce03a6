#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mwsp {

using NodeId = std::uint32_t;
using Label = std::int32_t;

/// Label value carried by nodes of a dataset loaded without a node-label file.
inline constexpr Label kUnsetLabel = 0;

/// Immutable undirected node-labeled graph. Neighbor lists are sorted by node index.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an undirected edge list. Duplicate and reversed
  /// edges collapse into one; self-loops are dropped.
  static Graph from_edges(std::size_t node_count,
                          std::span<const std::pair<NodeId, NodeId>> edges,
                          std::vector<Label> labels);

  /// Takes adjacency verbatim (no symmetrization or deduplication) so that
  /// malformed inputs can be inspected with validate_graph.
  static Graph from_adjacency(std::vector<std::vector<NodeId>> adjacency,
                              std::vector<Label> labels);

  std::size_t node_count() const { return adjacency_.size(); }
  /// Number of undirected edges (half the sum of neighbor list lengths).
  std::size_t edge_count() const;
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  Label label(NodeId v) const { return labels_[v]; }
  std::span<const Label> labels() const { return labels_; }
  const std::vector<std::vector<NodeId>>& adjacency() const { return adjacency_; }

  Graph with_labels(std::vector<Label> labels) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Graph(std::vector<std::vector<NodeId>> adjacency, std::vector<Label> labels);

  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Label> labels_;
};

struct GraphDataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> class_labels;
  /// False when the source carried no node labels and nothing has been assigned yet.
  bool labeled = true;

  std::size_t size() const { return graphs.size(); }
  /// Sorted distinct class ids.
  std::vector<int> classes() const;
  /// Number of distinct node label values over all graphs.
  std::size_t node_label_count() const;
};

enum class ViolationKind { asymmetric_edge, self_loop, duplicate_edge, unsorted_neighbors,
                           neighbor_out_of_range, nonpositive_label, label_count_mismatch };

struct Violation {
  ViolationKind kind;
  NodeId node = 0;
  NodeId other = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
};

/// Reports every invariant violation of the graph; never throws.
ValidationReport validate_graph(const Graph& graph);

enum class SurrogateMode { degree, uniform };

/// Replaces node labels: degree mode assigns degree + 1, uniform mode assigns 1.
/// Refuses datasets that already carry labels unless `override_existing` is set.
GraphDataset assign_surrogate_labels(const GraphDataset& dataset, SurrogateMode mode,
                                     bool override_existing = false);

struct StatsReport {
  std::size_t size = 0;
  std::size_t class_count = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
  /// Zero for unlabeled datasets.
  std::size_t node_label_count = 0;
  double mean_sp_length = 0.0;
  std::size_t max_sp_length = 0;
};

/// How mean_sp_length aggregates over graphs. Disconnected pairs never count.
enum class SpMeanMode {
  per_graph,  ///< mean over graphs of each graph's mean pair distance
  pooled,     ///< mean over all connected distinct pairs of the dataset
};

StatsReport dataset_statistics(const GraphDataset& dataset, SpMeanMode mode = SpMeanMode::pooled);

/// Hop distances from `source`; unreachable nodes get -1.
std::vector<int> bfs_distances(const Graph& graph, NodeId source);

}  // namespace mwsp
