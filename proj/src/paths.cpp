#include "mwsp/paths.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>

#include "mwsp/error.hpp"
#include "mwsp/parallel.hpp"

namespace mwsp {

NeighborOrder::NeighborOrder(const Graph& graph) : graph_(&graph), ordered_(graph.adjacency()) {
  const auto key = [&graph](NodeId v) { return std::tuple(graph.label(v), graph.degree(v), v); };
  for (auto& list : ordered_) {
    std::sort(list.begin(), list.end(), [&](NodeId a, NodeId b) { return key(a) < key(b); });
  }
}

std::vector<std::vector<std::size_t>> BfsTree::children() const {
  std::vector<std::vector<std::size_t>> out(members.size());
  for (std::size_t m = 1; m < members.size(); ++m) out[parent[m]].push_back(m);
  return out;
}

BfsTree truncated_bfs_tree(const NeighborOrder& order, NodeId root, std::size_t depth) {
  const auto& graph = order.graph();
  if (root >= graph.node_count()) {
    throw std::out_of_range("truncated_bfs_tree: root " + std::to_string(root) + " out of range");
  }
  BfsTree tree;
  tree.root = root;
  tree.members.push_back(root);
  tree.parent.push_back(BfsTree::kNoParent);
  tree.depth.push_back(0);
  std::vector<bool> seen(graph.node_count(), false);
  seen[root] = true;
  for (std::size_t head = 0; head < tree.members.size(); ++head) {
    if (tree.depth[head] >= depth) break;
    for (NodeId u : order.neighbors(tree.members[head])) {
      if (seen[u]) continue;
      seen[u] = true;
      tree.members.push_back(u);
      tree.parent.push_back(head);
      tree.depth.push_back(tree.depth[head] + 1);
    }
  }
  return tree;
}

BfsTree truncated_bfs_tree(const Graph& graph, NodeId root, std::size_t depth) {
  return truncated_bfs_tree(NeighborOrder(graph), root, depth);
}

std::vector<Path> enumerate_root_paths(const BfsTree& tree) {
  std::vector<Path> out;
  out.reserve(tree.size());
  for (std::size_t m = 0; m < tree.size(); ++m) {
    Path path;
    path.reserve(tree.depth[m] + 1);
    for (std::size_t at = m; at != BfsTree::kNoParent; at = tree.parent[at]) path.push_back(tree.members[at]);
    std::reverse(path.begin(), path.end());
    out.push_back(std::move(path));
  }
  return out;
}

std::size_t RootPathSet::total_paths() const {
  std::size_t total = 0;
  for (const auto& graph : paths)
    for (const auto& node : graph) total += node.size();
  return total;
}

RootPathSet all_shortest_paths(const GraphDataset& dataset, std::size_t depth, unsigned jobs) {
  RootPathSet out;
  out.depth = depth;
  out.paths.resize(dataset.graphs.size());
  parallel_for(dataset.graphs.size(), jobs, [&](std::size_t g) {
    const auto& graph = dataset.graphs[g];
    const NeighborOrder order(graph);
    auto& per_node = out.paths[g];
    per_node.resize(graph.node_count());
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      per_node[v] = enumerate_root_paths(truncated_bfs_tree(order, v, depth));
    }
  });
  return out;
}

void write_path_dump(std::ostream& out, const GraphDataset& dataset, const RootPathSet& paths) {
  for (std::size_t g = 0; g < paths.paths.size(); ++g) {
    const auto& graph = dataset.graphs.at(g);
    for (std::size_t v = 0; v < paths.paths[g].size(); ++v) {
      out << "# graph " << g << " node " << v << '\n';
      for (const auto& path : paths.paths[g][v]) {
        for (std::size_t i = 0; i < path.size(); ++i) out << (i ? "," : "") << graph.label(path[i]);
        out << '\n';
      }
    }
  }
}

}  // namespace mwsp
