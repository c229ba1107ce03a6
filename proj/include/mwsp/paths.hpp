#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "mwsp/graph.hpp"

namespace mwsp {

/// Neighbor lists re-sorted into the canonical BFS visiting order:
/// ascending (node label, node degree, node index).
class NeighborOrder {
 public:
  explicit NeighborOrder(const Graph& graph);
  const Graph& graph() const { return *graph_; }
  std::span<const NodeId> neighbors(NodeId v) const { return ordered_[v]; }

 private:
  const Graph* graph_;
  std::vector<std::vector<NodeId>> ordered_;
};

/// Breadth-first tree cut at a fixed depth. Position 0 is the root; members
/// are stored in discovery order, which is also (depth, discovery) order.
struct BfsTree {
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  NodeId root = 0;
  std::vector<NodeId> members;
  /// Position in `members` of each member's parent; kNoParent for the root.
  std::vector<std::size_t> parent;
  std::vector<std::uint32_t> depth;

  std::size_t size() const { return members.size(); }
  /// Child positions of every member, in discovery order.
  std::vector<std::vector<std::size_t>> children() const;
};

BfsTree truncated_bfs_tree(const NeighborOrder& order, NodeId root, std::size_t depth);
BfsTree truncated_bfs_tree(const Graph& graph, NodeId root, std::size_t depth);

using Path = std::vector<NodeId>;

/// One root-to-member path per tree member, in member order.
std::vector<Path> enumerate_root_paths(const BfsTree& tree);

/// Root paths of every node of every graph, indexed [graph][node][path].
struct RootPathSet {
  std::size_t depth = 0;
  std::vector<std::vector<std::vector<Path>>> paths;

  std::size_t total_paths() const;
};

RootPathSet all_shortest_paths(const GraphDataset& dataset, std::size_t depth, unsigned jobs = 1);

/// Text dump: one line per path, labels joined by commas, with a
/// "# graph g node v" header before each root.
void write_path_dump(std::ostream& out, const GraphDataset& dataset, const RootPathSet& paths);

}  // namespace mwsp
