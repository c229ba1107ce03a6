#include "mwsp/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <tuple>

#include "mwsp/canonical.hpp"
#include "mwsp/error.hpp"
#include "mwsp/parallel.hpp"
#include "mwsp/wasserstein.hpp"

namespace mwsp {

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::mwsp: return "MWSP";
    case Variant::wsp: return "WSP";
    case Variant::mwsp_gfm: return "MWSP-GFM";
    case Variant::sp_baseline: return "SP-baseline";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "mwsp") return Variant::mwsp;
  if (lower == "wsp") return Variant::wsp;
  if (lower == "mwsp-gfm" || lower == "mwsp_gfm" || lower == "gfm") return Variant::mwsp_gfm;
  if (lower == "sp" || lower == "sp-baseline" || lower == "sp_baseline") return Variant::sp_baseline;
  return std::nullopt;
}

void KernelConfig::validate() const {
  if (variant != Variant::sp_baseline && !(lambda > 0.0 && std::isfinite(lambda))) {
    throw PreconditionError("lambda must be a positive finite number");
  }
}

KernelConfig KernelConfig::effective() const {
  KernelConfig out = *this;
  if (variant == Variant::wsp) out.k = 0;
  return out;
}

double pair_kernel(const NodeFeatureMatrix& a, const NodeFeatureMatrix& b, double lambda) {
  if (a.width != b.width) throw DimensionError("pair_kernel: feature matrices use different column spaces");
  return std::exp(-lambda * solve_w1(a.rows, b.rows).distance);
}

Eigen::MatrixXd wasserstein_distance_matrix(const FeatureSet& features, bool graph_level, unsigned jobs) {
  const auto n = features.matrices.size();
  std::vector<std::vector<SparseRow>> sets(n);
  for (std::size_t g = 0; g < n; ++g) {
    if (graph_level) {
      sets[g] = {graph_feature_map(features.matrices[g]).values};
    } else {
      sets[g] = features.matrices[g].rows;
    }
  }
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // One task per row of the upper triangle.
  parallel_for(n, jobs, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = sets[i].empty() || sets[j].empty() ? 0.0 : solve_w1(sets[i], sets[j]).distance;
      dist(i, j) = w;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist(j, i) = dist(i, j);
  return dist;
}

Eigen::MatrixXd laplacian_kernel(const Eigen::MatrixXd& distances, double lambda) {
  return (-lambda * distances.array()).exp().matrix();
}

namespace {

void require_labeled(const GraphDataset& dataset) {
  if (!dataset.labeled) {
    throw PreconditionError("dataset '" + dataset.name +
                            "' has no node labels; assign surrogate labels (degree or uniform) first");
  }
}

}  // namespace

Eigen::MatrixXd variant_distance_matrix(const GraphDataset& dataset, const KernelConfig& config, unsigned jobs) {
  require_labeled(dataset);
  const auto cfg = config.effective();
  if (cfg.variant == Variant::sp_baseline) throw PreconditionError("SP baseline has no distance matrix");
  const auto features = build_features(dataset, cfg.d, cfg.k, jobs);
  return wasserstein_distance_matrix(features, cfg.variant == Variant::mwsp_gfm, jobs);
}

GramMatrix build_gram(const GraphDataset& dataset, const KernelConfig& config, unsigned jobs) {
  config.validate();
  if (config.variant == Variant::sp_baseline) {
    auto gram = sp_baseline_gram(dataset, jobs);
    gram.config = config;
    return gram;
  }
  GramMatrix gram;
  gram.dataset = dataset.name;
  gram.config = config.effective();
  gram.values = laplacian_kernel(variant_distance_matrix(dataset, config, jobs), config.lambda);
  return gram;
}

GramMatrix sp_baseline_gram(const GraphDataset& dataset, unsigned jobs) {
  require_labeled(dataset);
  using Triplet = std::tuple<Label, Label, int>;
  const auto n = dataset.graphs.size();
  std::vector<std::map<Triplet, double>> histograms(n);
  parallel_for(n, jobs, [&](std::size_t g) {
    const auto& graph = dataset.graphs[g];
    for (NodeId s = 0; s < graph.node_count(); ++s) {
      const auto dist = bfs_distances(graph, s);
      for (NodeId t = s + 1; t < graph.node_count(); ++t) {
        if (dist[t] <= 0) continue;
        const auto a = graph.label(s), b = graph.label(t);
        histograms[g][{std::min(a, b), std::max(a, b), dist[t]}] += 1.0;
      }
    }
  });
  GramMatrix gram;
  gram.dataset = dataset.name;
  gram.config.variant = Variant::sp_baseline;
  gram.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, jobs, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      double dot = 0.0;
      const auto& small = histograms[i].size() <= histograms[j].size() ? histograms[i] : histograms[j];
      const auto& large = &small == &histograms[i] ? histograms[j] : histograms[i];
      for (const auto& [key, count] : small) {
        const auto it = large.find(key);
        if (it != large.end()) dot += count * it->second;
      }
      gram.values(i, j) = dot;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) gram.values(j, i) = gram.values(i, j);
  return gram;
}

std::size_t estimate_feature_bytes(const GraphDataset& dataset, std::size_t d, std::size_t k) {
  // Paths: one per ball member, at most d + 1 node ids each. Features: one
  // sparse entry per path per scale plus at most one vocabulary entry of the
  // same length. Dictionaries: one canonical string per node per scale, with
  // up to four tokens per tree member.
  std::size_t paths = 0, tree_tokens = 0;
  for (const auto& graph : dataset.graphs) {
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      const auto dist = bfs_distances(graph, v);
      for (int dv : dist) {
        if (dv < 0) continue;
        if (static_cast<std::size_t>(dv) <= d) ++paths;
        if (static_cast<std::size_t>(dv) <= k) ++tree_tokens;
      }
    }
  }
  const std::size_t scales = k + 1;
  const std::size_t path_bytes = paths * (d + 1) * sizeof(NodeId);
  const std::size_t feature_bytes = paths * scales * sizeof(SparseRow::Entry);
  const std::size_t vocabulary_bytes = paths * scales * (d + 1) * sizeof(Label);
  const std::size_t dictionary_bytes = tree_tokens * 4 * sizeof(std::int64_t) * 2;
  return path_bytes + feature_bytes + vocabulary_bytes + dictionary_bytes;
}

void write_gram_csv(std::ostream& out, const Eigen::MatrixXd& values) {
  char buffer[64];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", values(i, j));
      if (j) out << ',';
      out << buffer;
    }
    out << '\n';
  }
}

nlohmann::json gram_metadata(const GramMatrix& gram) {
  nlohmann::json meta;
  meta["dataset"] = gram.dataset;
  meta["variant"] = to_string(gram.config.variant);
  meta["size"] = gram.values.rows();
  if (gram.config.variant != Variant::sp_baseline) {
    meta["d"] = gram.config.d;
    meta["k"] = gram.config.k;
    meta["lambda"] = gram.config.lambda;
  }
  return meta;
}

}  // namespace mwsp
