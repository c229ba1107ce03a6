#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mwsp/graph.hpp"
#include "mwsp/paths.hpp"

namespace mwsp {

/// Canonical encoding of a rooted labeled tree: the root label followed, if
/// the root has children, by "(" child encodings separated by "," ")".
/// Children appear in ascending encoding order, which makes the encoding
/// independent of child insertion order and injective on rooted labeled trees.
///
/// Tokens are compared numerically, so label 10 sorts after label 2. Grouping
/// tokens order before any label: open < close < separator < labels.
class CanonString {
 public:
  static constexpr std::int64_t kOpen = -3;
  static constexpr std::int64_t kClose = -2;
  static constexpr std::int64_t kSeparator = -1;

  CanonString() = default;
  explicit CanonString(std::vector<std::int64_t> tokens) : tokens_(std::move(tokens)) {}

  std::span<const std::int64_t> tokens() const { return tokens_; }
  std::string to_string() const;

  friend auto operator<=>(const CanonString&, const CanonString&) = default;
  friend bool operator==(const CanonString&, const CanonString&) = default;

 private:
  std::vector<std::int64_t> tokens_;
};

CanonString canonical_tree_string(const BfsTree& tree, std::span<const Label> labels);

/// Sorted unique canonical strings of one scale; the label of an entry is its
/// 1-based position.
struct TreeDictionary {
  std::size_t scale = 0;
  std::vector<CanonString> entries;

  std::size_t size() const { return entries.size(); }
  /// Throws InternalError for strings that were never inserted.
  Label label_of(const CanonString& tree) const;
};

/// Per-scale node labels, indexed [graph][node].
struct ScaleLabeling {
  std::size_t scale = 0;
  std::vector<std::vector<Label>> labels;
};

TreeDictionary build_scale_dictionary(const GraphDataset& dataset, std::size_t scale, unsigned jobs = 1);

struct Augmentation {
  std::vector<TreeDictionary> dictionaries;  ///< one per scale 0..k
  std::vector<ScaleLabeling> labelings;      ///< one per scale 0..k
};

/// Relabels every node by the dictionary index of its depth-i tree for i = 0..k.
Augmentation augment_labels(const GraphDataset& dataset, std::size_t k, unsigned jobs = 1);

/// One record per line: "scale<TAB>label<TAB>canonical string".
void write_dictionary_dump(std::ostream& out, const TreeDictionary& dictionary);

}  // namespace mwsp
