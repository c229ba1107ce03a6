#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mwsp/oracles.hpp"
#include "mwsp/paths.hpp"
#include "support.hpp"

using namespace mwsp;

namespace {

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("depth-one tree at the label-4 node of G1") {
  const auto ds = support::fig2();
  const auto& g = ds.graphs[0];
  const auto tree = truncated_bfs_tree(g, support::g1::A, 1);
  REQUIRE(tree.size() == 4);
  CHECK(tree.members[0] == support::g1::A);
  std::vector<Label> child_labels;
  for (std::size_t p = 1; p < tree.size(); ++p) {
    CHECK(tree.parent[p] == 0);
    CHECK(tree.depth[p] == 1);
    child_labels.push_back(g.label(tree.members[p]));
  }
  CHECK(child_labels == std::vector<Label>{1, 3, 3});
}

TEST_CASE("depth zero keeps only the root") {
  const auto ds = support::fig2();
  for (NodeId v = 0; v < 6; ++v) {
    const auto tree = truncated_bfs_tree(ds.graphs[1], v, 0);
    CHECK(tree.size() == 1);
    CHECK(enumerate_root_paths(tree) == std::vector<Path>{{v}});
  }
  CHECK_THROWS_AS(truncated_bfs_tree(ds.graphs[1], 6, 1), std::out_of_range);
}

TEST_CASE("4-cycle antipode gets one parent by canonical order") {
  // Equal labels and degrees: order falls back to node index, so node 1 discovers 2.
  const auto c4 = support::make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {1, 1, 1, 1});
  const auto tree = truncated_bfs_tree(c4, 0, 2);
  CHECK(tree.members == std::vector<NodeId>{0, 1, 3, 2});
  CHECK(tree.parent[3] == 1);
  CHECK(tree.depth[3] == 2);
  // A smaller label on node 3 moves it first in the visiting order.
  const auto relabeled = support::make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {1, 2, 1, 1});
  const auto t2 = truncated_bfs_tree(relabeled, 0, 2);
  CHECK(t2.members == std::vector<NodeId>{0, 3, 1, 2});
  CHECK(t2.members[t2.parent[3]] == 3);
}

TEST_CASE("root path label sequences of the worked example") {
  const auto ds = support::fig2();
  const auto p1 = enumerate_root_paths(truncated_bfs_tree(ds.graphs[0], support::g1::A, 1));
  CHECK(support::path_strings(p1, ds.graphs[0].labels()) == std::vector<std::string>{"4", "4,1", "4,3", "4,3"});
  const auto p2 = enumerate_root_paths(truncated_bfs_tree(ds.graphs[1], support::g2::A, 1));
  CHECK(support::path_strings(p2, ds.graphs[1].labels()) ==
        std::vector<std::string>{"4", "4,1", "4,2", "4,3", "4,3"});
}

TEST_CASE("all_shortest_paths counts") {
  const auto ds = support::fig2();
  const auto set1 = all_shortest_paths(ds, 1);
  std::size_t g1_total = 0;
  for (const auto& node : set1.paths[0]) g1_total += node.size();
  CHECK(set1.paths[0].size() == 6);
  CHECK(g1_total == 16);
  const auto set0 = all_shortest_paths(support::mutag(), 0);
  for (const auto& graph : set0.paths)
    for (std::size_t v = 0; v < graph.size(); ++v) CHECK(graph[v] == std::vector<Path>{{static_cast<NodeId>(v)}});
}

TEST_CASE("MUTAG depth 6 paths match an all-pairs oracle") {
  const auto ds = support::mutag();
  const std::size_t d = 6;
  const auto set = all_shortest_paths(ds, d);
  std::size_t expected = 0;
  bool lengths_ok = true, adjacent_ok = true, distinct_ok = true;
  for (std::size_t g = 0; g < ds.size(); ++g) {
    const auto& graph = ds.graphs[g];
    const auto dist = oracle::all_pairs_distances(graph);
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      for (NodeId u = 0; u < graph.node_count(); ++u)
        if (dist[v][u] >= 0 && dist[v][u] <= static_cast<int>(d)) ++expected;
      for (const auto& path : set.paths[g][v]) {
        lengths_ok &= path.front() == v;
        lengths_ok &= static_cast<int>(path.size()) - 1 == dist[v][path.back()];
        lengths_ok &= path.size() - 1 <= d;
        auto copy = path;
        std::sort(copy.begin(), copy.end());
        distinct_ok &= std::adjacent_find(copy.begin(), copy.end()) == copy.end();
        for (std::size_t i = 1; i < path.size(); ++i) {
          const auto nb = graph.neighbors(path[i - 1]);
          adjacent_ok &= std::binary_search(nb.begin(), nb.end(), path[i]);
        }
      }
    }
  }
  CHECK(set.total_paths() == expected);
  CHECK(lengths_ok);
  CHECK(adjacent_ok);
  CHECK(distinct_ok);
}

TEST_CASE("path extraction is deterministic and schedule independent") {
  const auto ds = support::mutag();
  const auto a = all_shortest_paths(ds, 3, 1);
  const auto b = all_shortest_paths(ds, 3, 4);
  CHECK(a.paths == b.paths);
  CHECK(all_shortest_paths(ds, 3, 1).paths == a.paths);
}

TEST_CASE("on trees the label-path multiset survives node permutation") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto g = oracle::random_tree_graph(rng, 1 + rng() % 12, 3);
    std::vector<NodeId> perm(g.node_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto h = oracle::permute(g, perm);
    for (std::size_t d = 0; d < 4; ++d) {
      for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto pg = support::path_strings(enumerate_root_paths(truncated_bfs_tree(g, v, d)), g.labels());
        const auto ph = support::path_strings(enumerate_root_paths(truncated_bfs_tree(h, perm[v], d)), h.labels());
        CHECK(sorted(pg) == sorted(ph));
      }
    }
  }
}

TEST_CASE("path dump format") {
  const auto ds = support::fig2();
  GraphDataset one = ds;
  one.graphs.resize(1);
  one.class_labels.resize(1);
  std::ostringstream out;
  write_path_dump(out, one, all_shortest_paths(one, 1));
  const auto text = out.str();
  CHECK(text.find("# graph 0 node 3\n4\n4,1\n4,3\n4,3\n") != std::string::npos);
}
