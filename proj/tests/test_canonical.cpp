#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mwsp/canonical.hpp"
#include "mwsp/error.hpp"
#include "mwsp/features.hpp"
#include "mwsp/oracles.hpp"
#include "support.hpp"

using namespace mwsp;

TEST_CASE("encoding of the worked-example trees") {
  const auto ds = support::fig2();
  const auto& g1 = ds.graphs[0];
  CHECK(canonical_tree_string(truncated_bfs_tree(g1, support::g1::A, 0), g1.labels()).to_string() == "4");
  CHECK(canonical_tree_string(truncated_bfs_tree(g1, support::g1::A, 1), g1.labels()).to_string() == "4(1,3,3)");
  CHECK(canonical_tree_string(truncated_bfs_tree(g1, support::g1::A, 2), g1.labels()).to_string() ==
        "4(1,3(1),3(2))");
}

TEST_CASE("token order is numeric") {
  CHECK(CanonString({2}) < CanonString({10}));
  CHECK(CanonString({4, CanonString::kOpen, 1, CanonString::kClose}) > CanonString({4}));
  // Labels above 9 compare after smaller labels even though "10" < "2" as text.
  const auto g = support::make_graph(3, {{0, 1}, {0, 2}}, {1, 10, 2});
  CHECK(canonical_tree_string(truncated_bfs_tree(g, 0, 1), g.labels()).to_string() == "1(2,10)");
}

TEST_CASE("depth-2 dictionary over the fixture") {
  const auto ds = support::fig2();
  const auto dict = build_scale_dictionary(ds, 2);
  CHECK(dict.size() == 11);
  const auto aug = augment_labels(ds, 2);
  const auto& labels2 = aug.labelings[2].labels;
  // The label-3 node adjacent to D and A has the same depth-2 tree in both graphs.
  CHECK(labels2[0][support::g1::C] == labels2[1][support::g2::C]);
  std::set<Label> distinct;
  for (const auto& g : labels2)
    for (auto l : g) distinct.insert(l);
  CHECK(distinct.size() == 11);
  CHECK(*distinct.begin() == 1);
  CHECK(*distinct.rbegin() == 11);
}

TEST_CASE("scale-2 paths from the label-4 node of G1, up to relabeling") {
  const auto ds = support::fig2();
  const auto aug = augment_labels(ds, 2);
  const auto& lab = aug.labelings[2];
  const auto paths = enumerate_root_paths(truncated_bfs_tree(ds.graphs[0], support::g1::A, 1));
  std::vector<LabelSequence> reps;
  for (const auto& p : paths) reps.push_back(path_representation(p, lab, 0));
  const auto a = lab.labels[0][support::g1::A], b = lab.labels[0][support::g1::B];
  const auto c = lab.labels[0][support::g1::C], e = lab.labels[0][support::g1::E];
  CHECK(reps == std::vector<LabelSequence>{{a}, {a, b}, {a, c}, {a, e}});
  CHECK(std::set<Label>{a, b, c, e}.size() == 4);
  // A's tree is the largest under the encoding order, so it takes the last index.
  CHECK(a == 11);
}

TEST_CASE("scale 0 dictionary is the label set") {
  const auto ds = support::dataset_of({support::make_graph(3, {{0, 1}, {1, 2}}, {3, 1, 2})});
  const auto dict = build_scale_dictionary(ds, 0);
  REQUIRE(dict.size() == 3);
  for (Label l = 1; l <= 3; ++l) CHECK(dict.label_of(CanonString({l})) == l);
  CHECK_THROWS_AS(dict.label_of(CanonString({9})), InternalError);
}

TEST_CASE("two disjoint (1,2) edges give two depth-1 trees") {
  const auto g = support::make_graph(4, {{0, 1}, {2, 3}}, {1, 2, 1, 2});
  const auto dict = build_scale_dictionary(support::dataset_of({g}), 1);
  CHECK(dict.size() == 2);
  CHECK(dict.entries[0].to_string() == "1(2)");
  CHECK(dict.entries[1].to_string() == "2(1)");
}

TEST_CASE("scale 0 labels are order-isomorphic to the input labels") {
  const auto ds = support::mutag();
  const auto aug = augment_labels(ds, 0);
  std::map<Label, Label> mapping;
  for (std::size_t g = 0; g < ds.size(); ++g)
    for (NodeId v = 0; v < ds.graphs[g].node_count(); ++v) {
      const auto [it, fresh] = mapping.emplace(ds.graphs[g].label(v), aug.labelings[0].labels[g][v]);
      CHECK(it->second == aug.labelings[0].labels[g][v]);
    }
  Label prev = 0;
  for (const auto& [orig, mapped] : mapping) {
    CHECK(mapped == prev + 1);
    prev = mapped;
  }
}

TEST_CASE("isomorphic tree graphs get equal label multisets at every scale") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 30; ++t) {
    const auto g = oracle::random_tree_graph(rng, 2 + rng() % 10, 3);
    std::vector<NodeId> perm(g.node_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto ds = support::dataset_of({g, oracle::permute(g, perm)});
    const auto aug = augment_labels(ds, 4);
    for (const auto& lab : aug.labelings) {
      auto a = lab.labels[0], b = lab.labels[1];
      for (NodeId v = 0; v < g.node_count(); ++v) CHECK(a[v] == b[perm[v]]);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
}

TEST_CASE("canonical strings are injective on random rooted trees") {
  const auto stats = oracle::check_canonical_trees(300, 21);
  CHECK(stats.trees == 300);
  CHECK(stats.isomorphic_pairs > 0);
  CHECK(stats.mismatches == 0);
  CHECK(stats.shuffle_failures == 0);
}

TEST_CASE("dictionary labels are contiguous and injective") {
  const auto ds = support::mutag();
  for (std::size_t s = 0; s <= 3; ++s) {
    const auto dict = build_scale_dictionary(ds, s);
    CHECK(std::is_sorted(dict.entries.begin(), dict.entries.end()));
    CHECK(std::adjacent_find(dict.entries.begin(), dict.entries.end()) == dict.entries.end());
    for (std::size_t i = 0; i < dict.size(); ++i) CHECK(dict.label_of(dict.entries[i]) == static_cast<Label>(i + 1));
  }
  CHECK(build_scale_dictionary(ds, 2, 1).entries == build_scale_dictionary(ds, 2, 3).entries);
}

TEST_CASE("dictionary dump") {
  const auto g = support::make_graph(2, {{0, 1}}, {1, 2});
  std::ostringstream out;
  write_dictionary_dump(out, build_scale_dictionary(support::dataset_of({g}), 1));
  CHECK(out.str() == "1\t1\t1(2)\n1\t2\t2(1)\n");
}
