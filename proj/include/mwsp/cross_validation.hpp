#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "mwsp/graph.hpp"
#include "mwsp/kernels.hpp"

namespace mwsp {

struct Hyperparameters {
  std::size_t d = 0;
  std::size_t k = 0;
  double lambda = 1.0;
  double C = 1.0;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

struct CvGrid {
  std::vector<std::size_t> d;
  std::vector<std::size_t> k;
  std::vector<double> lambda;
  std::vector<double> C;

  /// d, k in {0..6}, lambda in 10^-4..10^1, C in 10^-3..10^3.
  static CvGrid full();
};

struct CvOptions {
  std::size_t folds = 10;
  std::size_t repeats = 10;
  std::size_t inner_folds = 3;
  std::uint64_t seed = 0;
  /// Skips inner selection and evaluates exactly these parameters.
  std::optional<Hyperparameters> fixed;
  /// (d, k) pairs whose feature estimate exceeds this are dropped from the grid.
  std::size_t memory_limit_bytes = 0;  ///< 0 = unlimited
  double svm_tolerance = 1e-3;
  unsigned jobs = 1;
};

/// One precomputed Gram matrix over the whole dataset and the kernel
/// parameters that produced it.
struct KernelCandidate {
  std::size_t d = 0;
  std::size_t k = 0;
  double lambda = 0.0;
  Eigen::MatrixXd gram;
};

struct FoldRecord {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::size_t test_size = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  Hyperparameters chosen;
  /// Pooled inner validation accuracy of the chosen parameters (absent in fixed mode).
  std::optional<double> inner_accuracy;
};

struct CvTimings {
  double kernel_seconds = 0.0;
  double evaluation_seconds = 0.0;
};

struct CvReport {
  std::string dataset;
  Variant variant = Variant::mwsp;
  std::size_t folds = 0;
  std::size_t repeats = 0;
  std::size_t inner_folds = 0;
  std::uint64_t seed = 0;
  bool fixed = false;
  CvGrid grid;
  std::vector<std::pair<std::size_t, std::size_t>> skipped_scales;
  std::vector<FoldRecord> table;  ///< ordered by (repeat, fold)
  std::vector<double> repeat_means;
  double mean = 0.0;
  double std_repeats = 0.0;  ///< population std of the repeat means
  double std_folds = 0.0;    ///< population std of all fold accuracies
  CvTimings timings;
};

/// Stratified partition: each class is shuffled with `seed`, classes are
/// concatenated in ascending id order, and position p goes to fold p mod folds.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t folds,
                                                       std::uint64_t seed);

/// Repeated stratified CV on precomputed Gram matrices. Each candidate is
/// crossed with every C of `Cs`; the winner per outer fold is chosen by
/// inner CV on that fold's training rows only.
CvReport cross_validate_precomputed(std::span<const KernelCandidate> candidates, std::span<const double> Cs,
                                    std::span<const int> labels, const CvOptions& options);

/// Full protocol: builds Gram matrices for every grid point of `variant`
/// (once on the whole dataset) and runs cross_validate_precomputed.
CvReport cross_validate(const GraphDataset& dataset, Variant variant, const CvGrid& grid, const CvOptions& options);

/// Deterministic report body (no wall-clock fields).
nlohmann::json to_json(const CvReport& report);
nlohmann::json timings_json(const CvReport& report);

}  // namespace mwsp
