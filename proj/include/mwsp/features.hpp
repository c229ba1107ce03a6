#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mwsp/canonical.hpp"
#include "mwsp/graph.hpp"
#include "mwsp/paths.hpp"

namespace mwsp {

using LabelSequence = std::vector<Label>;

/// Sparse non-negative count vector over a column space of fixed width.
/// Entries are kept sorted by column with no explicit zeros.
class SparseRow {
 public:
  using Entry = std::pair<std::uint32_t, std::uint64_t>;

  SparseRow() = default;
  explicit SparseRow(std::size_t width) : width_(width) {}
  /// Sorts, merges duplicate columns and drops zeros.
  SparseRow(std::size_t width, std::vector<Entry> entries);
  static SparseRow from_dense(std::span<const double> values);

  std::size_t width() const { return width_; }
  std::span<const Entry> entries() const { return entries_; }
  std::uint64_t at(std::uint32_t column) const;
  std::uint64_t total() const;
  double squared_norm() const;
  std::vector<double> to_dense() const;

  SparseRow& operator+=(const SparseRow& other);
  friend bool operator==(const SparseRow&, const SparseRow&) = default;

 private:
  std::size_t width_ = 0;
  std::vector<Entry> entries_;
};

/// Sorted set of distinct label sequences seen at one scale. Column j is the
/// j-th entry under element-wise numeric lexicographic order.
struct PathVocabulary {
  std::size_t scale = 0;
  std::vector<LabelSequence> entries;

  std::size_t size() const { return entries.size(); }
  std::optional<std::uint32_t> column(std::span<const Label> representation) const;

  friend bool operator==(const PathVocabulary&, const PathVocabulary&) = default;
};

struct NodeFeatureMatrix {
  std::size_t graph = 0;
  std::size_t width = 0;
  /// Column offset of each scale block; block i spans [offsets[i], offsets[i+1]).
  std::vector<std::size_t> block_offsets;
  std::vector<SparseRow> rows;
};

struct GraphFeatureVector {
  std::size_t graph = 0;
  SparseRow values;
};

LabelSequence path_representation(std::span<const NodeId> path, const ScaleLabeling& labeling, std::size_t graph);

PathVocabulary build_vocabulary(const RootPathSet& paths, const ScaleLabeling& labeling);

/// Occurrence counts of each vocabulary entry among one node's root paths.
/// Throws InternalError if a path has no column.
SparseRow node_feature_map(std::span<const Path> node_paths, const ScaleLabeling& labeling,
                           std::size_t graph, const PathVocabulary& vocabulary);

/// Column-wise sum of the node rows.
GraphFeatureVector graph_feature_map(const NodeFeatureMatrix& matrix);

/// Places block i at the offset given by the running sum of widths[0..i).
/// Throws DimensionError when the number of blocks differs from widths.size()
/// or a block's width disagrees.
SparseRow multiscale_concat(std::span<const SparseRow> per_scale, std::span<const std::size_t> widths);

/// Everything the kernels need for one (d, k): vocabularies per scale and
/// one multi-scale node feature matrix per graph.
struct FeatureSet {
  std::size_t d = 0;
  std::size_t k = 0;
  std::vector<PathVocabulary> vocabularies;
  std::vector<NodeFeatureMatrix> matrices;

  std::size_t width() const;
};

FeatureSet build_features(const RootPathSet& paths, std::span<const ScaleLabeling> labelings, unsigned jobs = 1);
FeatureSet build_features(const GraphDataset& dataset, std::size_t d, std::size_t k, unsigned jobs = 1);

/// Per graph, per node: "g<TAB>v<TAB>col:count col:count ...".
void write_feature_dump(std::ostream& out, const FeatureSet& features);

}  // namespace mwsp
