#include "mwsp/features.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "mwsp/error.hpp"
#include "mwsp/parallel.hpp"

namespace mwsp {

SparseRow::SparseRow(std::size_t width, std::vector<Entry> entries) : width_(width), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  std::vector<Entry> merged;
  merged.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (e.first >= width_) throw DimensionError("column " + std::to_string(e.first) + " outside row width");
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const Entry& e) { return e.second == 0; });
  entries_ = std::move(merged);
}

SparseRow SparseRow::from_dense(std::span<const double> values) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw DimensionError("feature rows hold non-negative counts");
    if (values[i] != 0) entries.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint64_t>(values[i]));
  }
  return SparseRow(values.size(), std::move(entries));
}

std::uint64_t SparseRow::at(std::uint32_t column) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{column, 0});
  return it != entries_.end() && it->first == column ? it->second : 0;
}

std::uint64_t SparseRow::total() const {
  std::uint64_t sum = 0;
  for (const auto& e : entries_) sum += e.second;
  return sum;
}

double SparseRow::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += static_cast<double>(e.second) * static_cast<double>(e.second);
  return sum;
}

std::vector<double> SparseRow::to_dense() const {
  std::vector<double> out(width_, 0.0);
  for (const auto& e : entries_) out[e.first] = static_cast<double>(e.second);
  return out;
}

SparseRow& SparseRow::operator+=(const SparseRow& other) {
  if (other.width_ != width_) throw DimensionError("cannot add rows of different widths");
  std::vector<Entry> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      merged.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  entries_ = std::move(merged);
  return *this;
}

std::optional<std::uint32_t> PathVocabulary::column(std::span<const Label> representation) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), representation,
                                   [](const LabelSequence& e, std::span<const Label> r) {
                                     return std::lexicographical_compare(e.begin(), e.end(), r.begin(), r.end());
                                   });
  if (it == entries.end() || !std::equal(it->begin(), it->end(), representation.begin(), representation.end())) {
    return std::nullopt;
  }
  return static_cast<std::uint32_t>(it - entries.begin());
}

LabelSequence path_representation(std::span<const NodeId> path, const ScaleLabeling& labeling, std::size_t graph) {
  const auto& labels = labeling.labels.at(graph);
  LabelSequence out;
  out.reserve(path.size());
  for (NodeId v : path) out.push_back(labels.at(v));
  return out;
}

PathVocabulary build_vocabulary(const RootPathSet& paths, const ScaleLabeling& labeling) {
  PathVocabulary vocab;
  vocab.scale = labeling.scale;
  for (std::size_t g = 0; g < paths.paths.size(); ++g) {
    for (const auto& node_paths : paths.paths[g]) {
      for (const auto& path : node_paths) vocab.entries.push_back(path_representation(path, labeling, g));
    }
  }
  std::sort(vocab.entries.begin(), vocab.entries.end());
  vocab.entries.erase(std::unique(vocab.entries.begin(), vocab.entries.end()), vocab.entries.end());
  return vocab;
}

SparseRow node_feature_map(std::span<const Path> node_paths, const ScaleLabeling& labeling, std::size_t graph,
                           const PathVocabulary& vocabulary) {
  std::vector<SparseRow::Entry> entries;
  entries.reserve(node_paths.size());
  for (const auto& path : node_paths) {
    const auto rep = path_representation(path, labeling, graph);
    const auto col = vocabulary.column(rep);
    if (!col) throw InternalError("path representation missing from scale-" + std::to_string(vocabulary.scale) +
                                  " vocabulary");
    entries.emplace_back(*col, 1);
  }
  return SparseRow(vocabulary.size(), std::move(entries));
}

GraphFeatureVector graph_feature_map(const NodeFeatureMatrix& matrix) {
  GraphFeatureVector out{matrix.graph, SparseRow(matrix.width)};
  for (const auto& row : matrix.rows) out.values += row;
  return out;
}

SparseRow multiscale_concat(std::span<const SparseRow> per_scale, std::span<const std::size_t> widths) {
  if (per_scale.size() != widths.size()) {
    throw DimensionError("expected " + std::to_string(widths.size()) + " scale blocks, got " +
                         std::to_string(per_scale.size()));
  }
  std::vector<SparseRow::Entry> entries;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < per_scale.size(); ++i) {
    if (per_scale[i].width() != widths[i]) throw DimensionError("scale block width mismatch");
    for (const auto& [col, count] : per_scale[i].entries()) {
      entries.emplace_back(static_cast<std::uint32_t>(offset + col), count);
    }
    offset += widths[i];
  }
  return SparseRow(offset, std::move(entries));
}

std::size_t FeatureSet::width() const {
  std::size_t w = 0;
  for (const auto& v : vocabularies) w += v.size();
  return w;
}

FeatureSet build_features(const RootPathSet& paths, std::span<const ScaleLabeling> labelings, unsigned jobs) {
  FeatureSet out;
  out.d = paths.depth;
  out.k = labelings.empty() ? 0 : labelings.size() - 1;
  for (const auto& labeling : labelings) out.vocabularies.push_back(build_vocabulary(paths, labeling));

  std::vector<std::size_t> widths, offsets{0};
  for (const auto& v : out.vocabularies) {
    widths.push_back(v.size());
    offsets.push_back(offsets.back() + v.size());
  }
  out.matrices.resize(paths.paths.size());
  parallel_for(paths.paths.size(), jobs, [&](std::size_t g) {
    auto& matrix = out.matrices[g];
    matrix.graph = g;
    matrix.width = offsets.back();
    matrix.block_offsets = offsets;
    std::vector<SparseRow> blocks(labelings.size());
    for (const auto& node_paths : paths.paths[g]) {
      for (std::size_t i = 0; i < labelings.size(); ++i) {
        blocks[i] = node_feature_map(node_paths, labelings[i], g, out.vocabularies[i]);
      }
      matrix.rows.push_back(multiscale_concat(blocks, widths));
    }
  });
  return out;
}

FeatureSet build_features(const GraphDataset& dataset, std::size_t d, std::size_t k, unsigned jobs) {
  const auto paths = all_shortest_paths(dataset, d, jobs);
  const auto augmentation = augment_labels(dataset, k, jobs);
  return build_features(paths, augmentation.labelings, jobs);
}

void write_feature_dump(std::ostream& out, const FeatureSet& features) {
  for (const auto& matrix : features.matrices) {
    for (std::size_t v = 0; v < matrix.rows.size(); ++v) {
      out << matrix.graph << '\t' << v << '\t';
      bool first = true;
      for (const auto& [col, count] : matrix.rows[v].entries()) {
        out << (first ? "" : " ") << col << ':' << count;
        first = false;
      }
      out << '\n';
    }
  }
}

}  // namespace mwsp
