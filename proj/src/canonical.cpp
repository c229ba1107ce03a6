#include "mwsp/canonical.hpp"

#include <algorithm>
#include <ostream>

#include "mwsp/error.hpp"
#include "mwsp/parallel.hpp"

namespace mwsp {
namespace {

using Tokens = std::vector<std::int64_t>;

Tokens encode(std::size_t member, const BfsTree& tree, const std::vector<std::vector<std::size_t>>& children,
              std::span<const Label> labels) {
  Tokens out{labels[tree.members[member]]};
  const auto& kids = children[member];
  if (kids.empty()) return out;
  std::vector<Tokens> parts;
  parts.reserve(kids.size());
  for (auto c : kids) parts.push_back(encode(c, tree, children, labels));
  std::sort(parts.begin(), parts.end());
  out.push_back(CanonString::kOpen);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(CanonString::kSeparator);
    out.insert(out.end(), parts[i].begin(), parts[i].end());
  }
  out.push_back(CanonString::kClose);
  return out;
}

// Canonical strings of every node's depth-`scale` tree, indexed [graph][node].
std::vector<std::vector<CanonString>> canon_strings(const GraphDataset& dataset, std::size_t scale,
                                                    unsigned jobs) {
  std::vector<std::vector<CanonString>> out(dataset.graphs.size());
  parallel_for(dataset.graphs.size(), jobs, [&](std::size_t g) {
    const auto& graph = dataset.graphs[g];
    const NeighborOrder order(graph);
    out[g].reserve(graph.node_count());
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      out[g].push_back(canonical_tree_string(truncated_bfs_tree(order, v, scale), graph.labels()));
    }
  });
  return out;
}

TreeDictionary dictionary_from(const std::vector<std::vector<CanonString>>& strings, std::size_t scale) {
  TreeDictionary dict;
  dict.scale = scale;
  for (const auto& graph : strings) dict.entries.insert(dict.entries.end(), graph.begin(), graph.end());
  std::sort(dict.entries.begin(), dict.entries.end());
  dict.entries.erase(std::unique(dict.entries.begin(), dict.entries.end()), dict.entries.end());
  return dict;
}

}  // namespace

std::string CanonString::to_string() const {
  std::string out;
  for (auto t : tokens_) {
    switch (t) {
      case kOpen: out += '('; break;
      case kClose: out += ')'; break;
      case kSeparator: out += ','; break;
      default: out += std::to_string(t);
    }
  }
  return out;
}

CanonString canonical_tree_string(const BfsTree& tree, std::span<const Label> labels) {
  return CanonString(encode(0, tree, tree.children(), labels));
}

Label TreeDictionary::label_of(const CanonString& tree) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), tree);
  if (it == entries.end() || *it != tree) {
    throw InternalError("tree " + tree.to_string() + " missing from scale-" + std::to_string(scale) +
                        " dictionary");
  }
  return static_cast<Label>(it - entries.begin() + 1);
}

TreeDictionary build_scale_dictionary(const GraphDataset& dataset, std::size_t scale, unsigned jobs) {
  return dictionary_from(canon_strings(dataset, scale, jobs), scale);
}

Augmentation augment_labels(const GraphDataset& dataset, std::size_t k, unsigned jobs) {
  Augmentation out;
  for (std::size_t scale = 0; scale <= k; ++scale) {
    const auto strings = canon_strings(dataset, scale, jobs);
    auto dict = dictionary_from(strings, scale);
    ScaleLabeling labeling;
    labeling.scale = scale;
    labeling.labels.resize(strings.size());
    for (std::size_t g = 0; g < strings.size(); ++g) {
      labeling.labels[g].reserve(strings[g].size());
      for (const auto& s : strings[g]) labeling.labels[g].push_back(dict.label_of(s));
    }
    out.dictionaries.push_back(std::move(dict));
    out.labelings.push_back(std::move(labeling));
  }
  return out;
}

void write_dictionary_dump(std::ostream& out, const TreeDictionary& dictionary) {
  for (std::size_t i = 0; i < dictionary.entries.size(); ++i) {
    out << dictionary.scale << '\t' << (i + 1) << '\t' << dictionary.entries[i].to_string() << '\n';
  }
}

}  // namespace mwsp
