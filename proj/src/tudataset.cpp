#include "mwsp/tudataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <unordered_map>

#include "mwsp/error.hpp"

namespace mwsp {
namespace {

namespace fs = std::filesystem;

struct Line {
  std::size_t number;
  std::vector<long long> values;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Parses comma-separated integers per line; blank lines are skipped.
std::vector<Line> read_int_lines(const fs::path& file, std::size_t expected_columns) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open required file " + file.string());
  std::vector<Line> out;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto text = trim(raw);
    if (text.empty()) continue;
    Line line{number, {}};
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto token = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
      long long value = 0;
      const auto* end = token.data() + token.size();
      const auto [ptr, ec] = std::from_chars(token.data(), end, value);
      if (token.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(file.string(), number, "expected an integer, got '" + std::string(token) + "'");
      }
      line.values.push_back(value);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (line.values.size() < expected_columns) {
      throw ParseError(file.string(), number,
                       "expected " + std::to_string(expected_columns) + " values");
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

fs::path resolve_dataset_dir(const fs::path& root, const std::string& name) {
  const auto nested = root / name;
  if (fs::is_directory(nested)) return nested;
  return root;
}

GraphDataset load_tudataset(const fs::path& directory, const std::string& name) {
  const auto file = [&](const char* suffix) { return directory / (name + suffix); };
  const auto adjacency_file = file("_A.txt");
  const auto indicator_file = file("_graph_indicator.txt");
  const auto graph_labels_file = file("_graph_labels.txt");
  const auto node_labels_file = file("_node_labels.txt");
  for (const auto& f : {adjacency_file, indicator_file, graph_labels_file}) {
    if (!fs::is_regular_file(f)) throw FormatError("missing required file " + f.string());
  }

  const auto indicator = read_int_lines(indicator_file, 1);
  const auto graph_label_lines = read_int_lines(graph_labels_file, 1);

  // Distinct graph ids in ascending order map to graph positions.
  std::vector<long long> ids;
  ids.reserve(indicator.size());
  for (const auto& line : indicator) ids.push_back(line.values[0]);
  std::vector<long long> distinct = ids;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != graph_label_lines.size()) {
    throw IntegrityError(graph_labels_file.string(), graph_label_lines.empty() ? 0 : graph_label_lines.back().number,
                         std::to_string(graph_label_lines.size()) + " graph labels for " +
                             std::to_string(distinct.size()) + " graphs");
  }
  std::unordered_map<long long, std::size_t> graph_index;
  for (std::size_t i = 0; i < distinct.size(); ++i) graph_index.emplace(distinct[i], i);

  const std::size_t total_nodes = ids.size();
  std::vector<std::size_t> node_graph(total_nodes);
  std::vector<NodeId> node_local(total_nodes);
  std::vector<std::size_t> graph_sizes(distinct.size(), 0);
  for (std::size_t v = 0; v < total_nodes; ++v) {
    const auto g = graph_index.at(ids[v]);
    node_graph[v] = g;
    node_local[v] = static_cast<NodeId>(graph_sizes[g]++);
  }

  std::vector<std::vector<Label>> labels(distinct.size());
  for (std::size_t g = 0; g < distinct.size(); ++g) labels[g].assign(graph_sizes[g], kUnsetLabel);
  const bool labeled = fs::is_regular_file(node_labels_file);
  if (labeled) {
    const auto node_label_lines = read_int_lines(node_labels_file, 1);
    if (node_label_lines.size() != total_nodes) {
      throw IntegrityError(node_labels_file.string(),
                           node_label_lines.empty() ? 0 : node_label_lines.back().number,
                           std::to_string(node_label_lines.size()) + " node labels for " +
                               std::to_string(total_nodes) + " nodes");
    }
    std::map<long long, Label> remap;
    for (std::size_t v = 0; v < total_nodes; ++v) {
      const auto raw = node_label_lines[v].values[0];
      auto it = remap.find(raw);
      if (it == remap.end()) it = remap.emplace(raw, static_cast<Label>(remap.size() + 1)).first;
      labels[node_graph[v]][node_local[v]] = it->second;
    }
  }

  std::vector<std::vector<std::pair<NodeId, NodeId>>> edges(distinct.size());
  for (const auto& line : read_int_lines(adjacency_file, 2)) {
    const auto a = line.values[0], b = line.values[1];
    if (a < 1 || b < 1 || static_cast<std::size_t>(a) > total_nodes || static_cast<std::size_t>(b) > total_nodes) {
      throw IntegrityError(adjacency_file.string(), line.number, "edge references unknown node");
    }
    const auto u = static_cast<std::size_t>(a - 1), v = static_cast<std::size_t>(b - 1);
    if (node_graph[u] != node_graph[v]) {
      throw IntegrityError(adjacency_file.string(), line.number, "edge joins nodes of different graphs");
    }
    edges[node_graph[u]].emplace_back(node_local[u], node_local[v]);
  }

  GraphDataset dataset;
  dataset.name = name;
  dataset.labeled = labeled;
  dataset.graphs.reserve(distinct.size());
  for (std::size_t g = 0; g < distinct.size(); ++g) {
    dataset.graphs.push_back(Graph::from_edges(graph_sizes[g], edges[g], std::move(labels[g])));
    dataset.class_labels.push_back(static_cast<int>(graph_label_lines[g].values[0]));
  }
  return dataset;
}

void write_tudataset(const GraphDataset& dataset, const fs::path& directory) {
  fs::create_directories(directory);
  const auto open = [&](const char* suffix) {
    std::ofstream out(directory / (dataset.name + suffix));
    if (!out) throw FormatError("cannot write " + (directory / (dataset.name + suffix)).string());
    return out;
  };
  auto adjacency = open("_A.txt");
  auto indicator = open("_graph_indicator.txt");
  auto graph_labels = open("_graph_labels.txt");
  std::ofstream node_labels;
  if (dataset.labeled) node_labels = open("_node_labels.txt");

  std::size_t offset = 1;
  for (std::size_t g = 0; g < dataset.graphs.size(); ++g) {
    const auto& graph = dataset.graphs[g];
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      indicator << (g + 1) << '\n';
      if (dataset.labeled) node_labels << graph.label(v) << '\n';
      for (NodeId u : graph.neighbors(v)) adjacency << (offset + v) << ", " << (offset + u) << '\n';
    }
    graph_labels << dataset.class_labels[g] << '\n';
    offset += graph.node_count();
  }
}

}  // namespace mwsp
