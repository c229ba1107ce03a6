#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "json.hpp"
#include "mwsp/features.hpp"
#include "mwsp/graph.hpp"

namespace mwsp {

enum class Variant { mwsp, wsp, mwsp_gfm, sp_baseline };

std::string to_string(Variant variant);
/// Accepts "mwsp", "wsp", "mwsp-gfm", "sp" / "sp-baseline" (case-insensitive).
std::optional<Variant> parse_variant(std::string_view text);

struct KernelConfig {
  Variant variant = Variant::mwsp;
  std::size_t d = 1;
  std::size_t k = 0;
  double lambda = 1.0;

  /// Throws PreconditionError unless lambda is positive and finite.
  void validate() const;
  /// Applies the variant's fixed settings (WSP uses a single scale).
  KernelConfig effective() const;
};

struct GramMatrix {
  Eigen::MatrixXd values;
  KernelConfig config;
  std::string dataset;
};

/// exp(-lambda * W1) between the node feature rows of two graphs.
double pair_kernel(const NodeFeatureMatrix& a, const NodeFeatureMatrix& b, double lambda);

/// Pairwise W1 distances between the graphs of a feature set. With
/// `graph_level` each graph is reduced to its single summed feature vector.
/// Only the upper triangle is solved; the diagonal is exactly zero.
Eigen::MatrixXd wasserstein_distance_matrix(const FeatureSet& features, bool graph_level, unsigned jobs = 1);

/// Elementwise exp(-lambda * distance).
Eigen::MatrixXd laplacian_kernel(const Eigen::MatrixXd& distances, double lambda);

/// Distance matrix for an MWSP-family variant on a labeled dataset.
Eigen::MatrixXd variant_distance_matrix(const GraphDataset& dataset, const KernelConfig& config, unsigned jobs = 1);

GramMatrix build_gram(const GraphDataset& dataset, const KernelConfig& config, unsigned jobs = 1);

/// Classic shortest-path kernel: dot products of histograms over
/// (min label, max label, hop distance) for all connected distinct node pairs.
GramMatrix sp_baseline_gram(const GraphDataset& dataset, unsigned jobs = 1);

/// Upper bound, in bytes, on paths, dictionaries and feature rows needed by
/// an MWSP-family run, computed from truncated-BFS ball sizes only.
std::size_t estimate_feature_bytes(const GraphDataset& dataset, std::size_t d, std::size_t k);

/// n lines of n comma-separated values, 17 significant digits.
void write_gram_csv(std::ostream& out, const Eigen::MatrixXd& values);

nlohmann::json gram_metadata(const GramMatrix& gram);

}  // namespace mwsp
