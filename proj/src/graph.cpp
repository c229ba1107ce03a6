#include "mwsp/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "mwsp/error.hpp"

namespace mwsp {

Graph::Graph(std::vector<std::vector<NodeId>> adjacency, std::vector<Label> labels)
    : adjacency_(std::move(adjacency)), labels_(std::move(labels)) {}

Graph Graph::from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges,
                        std::vector<Label> labels) {
  if (labels.size() != node_count) {
    throw DimensionError("graph has " + std::to_string(node_count) + " nodes but " +
                         std::to_string(labels.size()) + " labels");
  }
  std::vector<std::vector<NodeId>> adjacency(node_count);
  for (const auto& [u, v] : edges) {
    if (u >= node_count || v >= node_count) {
      throw DimensionError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                           ") references a node outside the graph");
    }
    if (u == v) continue;
    adjacency[u].push_back(v);
    adjacency[v].push_back(u);
  }
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return Graph(std::move(adjacency), std::move(labels));
}

Graph Graph::from_adjacency(std::vector<std::vector<NodeId>> adjacency, std::vector<Label> labels) {
  return Graph(std::move(adjacency), std::move(labels));
}

std::size_t Graph::edge_count() const {
  std::size_t total = 0;
  for (const auto& list : adjacency_) total += list.size();
  return total / 2;
}

Graph Graph::with_labels(std::vector<Label> labels) const {
  if (labels.size() != node_count()) throw DimensionError("label vector length mismatch");
  return Graph(adjacency_, std::move(labels));
}

std::vector<int> GraphDataset::classes() const {
  std::vector<int> out(class_labels.begin(), class_labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t GraphDataset::node_label_count() const {
  std::set<Label> seen;
  for (const auto& g : graphs) seen.insert(g.labels().begin(), g.labels().end());
  return seen.size();
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_graph(const Graph& graph) {
  ValidationReport report;
  const auto n = graph.node_count();
  auto add = [&](ViolationKind kind, NodeId a, NodeId b, std::string msg) {
    report.violations.push_back({kind, a, b, std::move(msg)});
  };
  if (graph.labels().size() != n) {
    add(ViolationKind::label_count_mismatch, 0, 0, "label count differs from node count");
  }
  for (NodeId v = 0; v < n; ++v) {
    const auto nbrs = graph.neighbors(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const NodeId u = nbrs[i];
      const auto tag = std::to_string(v) + "-" + std::to_string(u);
      if (u >= n) {
        add(ViolationKind::neighbor_out_of_range, v, u, "neighbor out of range: " + tag);
        continue;
      }
      if (u == v) add(ViolationKind::self_loop, v, u, "self-loop at node " + std::to_string(v));
      if (i > 0 && nbrs[i - 1] == u) {
        add(ViolationKind::duplicate_edge, v, u, "duplicate edge " + tag);
      } else if (i > 0 && nbrs[i - 1] > u) {
        add(ViolationKind::unsorted_neighbors, v, u, "neighbors of " + std::to_string(v) + " not sorted");
      }
      const auto back = graph.neighbors(u);
      if (std::find(back.begin(), back.end(), v) == back.end()) {
        add(ViolationKind::asymmetric_edge, v, u, "edge " + tag + " has no reverse entry");
      }
    }
    if (v < graph.labels().size() && graph.label(v) < 1) {
      add(ViolationKind::nonpositive_label, v, v, "node " + std::to_string(v) + " has nonpositive label");
    }
  }
  return report;
}

GraphDataset assign_surrogate_labels(const GraphDataset& dataset, SurrogateMode mode,
                                     bool override_existing) {
  if (dataset.labeled && !override_existing) {
    throw PreconditionError("dataset '" + dataset.name +
                            "' already has node labels; pass an explicit override to replace them");
  }
  GraphDataset out;
  out.name = dataset.name;
  out.class_labels = dataset.class_labels;
  out.labeled = true;
  out.graphs.reserve(dataset.graphs.size());
  for (const auto& g : dataset.graphs) {
    std::vector<Label> labels(g.node_count(), 1);
    if (mode == SurrogateMode::degree) {
      for (NodeId v = 0; v < g.node_count(); ++v) labels[v] = static_cast<Label>(g.degree(v) + 1);
    }
    out.graphs.push_back(g.with_labels(std::move(labels)));
  }
  return out;
}

std::vector<int> bfs_distances(const Graph& graph, NodeId source) {
  std::vector<int> dist(graph.node_count(), -1);
  std::deque<NodeId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId u : graph.neighbors(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

StatsReport dataset_statistics(const GraphDataset& dataset, SpMeanMode mode) {
  if (dataset.graphs.empty()) throw PreconditionError("dataset_statistics: empty dataset");
  StatsReport report;
  report.size = dataset.graphs.size();
  report.class_count = dataset.classes().size();
  report.node_label_count = dataset.labeled ? dataset.node_label_count() : 0;

  double nodes = 0.0, edges = 0.0;
  double graph_mean_sum = 0.0;
  std::size_t graphs_with_pairs = 0;
  double pooled_sum = 0.0;
  std::size_t pooled_pairs = 0;
  for (const auto& g : dataset.graphs) {
    nodes += static_cast<double>(g.node_count());
    edges += static_cast<double>(g.edge_count());
    double sum = 0.0;
    std::size_t pairs = 0;
    for (NodeId s = 0; s < g.node_count(); ++s) {
      const auto dist = bfs_distances(g, s);
      for (NodeId t = s + 1; t < g.node_count(); ++t) {
        if (dist[t] <= 0) continue;
        sum += dist[t];
        ++pairs;
        report.max_sp_length = std::max(report.max_sp_length, static_cast<std::size_t>(dist[t]));
      }
    }
    if (pairs > 0) {
      graph_mean_sum += sum / static_cast<double>(pairs);
      ++graphs_with_pairs;
    }
    pooled_sum += sum;
    pooled_pairs += pairs;
  }
  const double count = static_cast<double>(report.size);
  report.avg_nodes = nodes / count;
  report.avg_edges = edges / count;
  if (mode == SpMeanMode::per_graph) {
    report.mean_sp_length = graphs_with_pairs ? graph_mean_sum / static_cast<double>(graphs_with_pairs) : 0.0;
  } else {
    report.mean_sp_length = pooled_pairs ? pooled_sum / static_cast<double>(pooled_pairs) : 0.0;
  }
  return report;
}

}  // namespace mwsp
