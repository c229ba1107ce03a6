#include "mwsp/cross_validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "mwsp/error.hpp"
#include "mwsp/features.hpp"
#include "mwsp/parallel.hpp"
#include "mwsp/svm.hpp"

namespace mwsp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng() % i]);
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return xs.empty() ? 0.0 : std::sqrt(s / static_cast<double>(xs.size()));
}

std::size_t count_correct(const Eigen::MatrixXd& train_gram, std::span<const int> train_labels,
                          const Eigen::MatrixXd& cross_gram, std::span<const int> test_labels, const SvmParams& params) {
  const OneVsOne model(train_gram, train_labels, params);
  const auto pred = model.predict(cross_gram);
  std::size_t correct = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) correct += pred[t] == test_labels[t];
  return correct;
}

std::vector<int> pick(std::span<const int> labels, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

struct Selection {
  std::size_t candidate = 0;
  std::size_t c_index = 0;
  double inner_accuracy = 0.0;
};

// Inner CV restricted to `train` (positions into the full dataset).
Selection select_parameters(std::span<const KernelCandidate> candidates, std::span<const double> Cs,
                            std::span<const int> labels, std::span<const std::size_t> train,
                            const CvOptions& options, std::uint64_t seed) {
  const auto train_labels = pick(labels, train);
  const auto inner = stratified_folds(train_labels, options.inner_folds, seed);
  std::vector<std::vector<std::size_t>> fit(inner.size());
  for (std::size_t f = 0; f < inner.size(); ++f) {
    for (std::size_t g = 0; g < inner.size(); ++g) {
      if (g != f) fit[f].insert(fit[f].end(), inner[g].begin(), inner[g].end());
    }
    std::sort(fit[f].begin(), fit[f].end());
  }

  Selection best;
  std::size_t best_correct = 0;
  bool have = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto gram = submatrix(candidates[c].gram, train, train);
    std::vector<std::size_t> correct(Cs.size(), 0);
    for (std::size_t f = 0; f < inner.size(); ++f) {
      const auto fit_gram = spectrum_clip(submatrix(gram, fit[f], fit[f]));
      const auto cross = submatrix(gram, inner[f], fit[f]);
      const auto fit_labels = pick(train_labels, fit[f]);
      const auto val_labels = pick(train_labels, inner[f]);
      for (std::size_t ci = 0; ci < Cs.size(); ++ci) {
        correct[ci] += count_correct(fit_gram, fit_labels, cross, val_labels, {Cs[ci], options.svm_tolerance});
      }
    }
    for (std::size_t ci = 0; ci < Cs.size(); ++ci) {
      if (!have || correct[ci] > best_correct) {
        have = true;
        best_correct = correct[ci];
        best = {c, ci, 0.0};
      }
    }
  }
  best.inner_accuracy = static_cast<double>(best_correct) / static_cast<double>(train.size());
  return best;
}

}  // namespace

CvGrid CvGrid::full() {
  CvGrid g;
  for (std::size_t i = 0; i <= 6; ++i) {
    g.d.push_back(i);
    g.k.push_back(i);
  }
  for (int e = -4; e <= 1; ++e) g.lambda.push_back(std::pow(10.0, e));
  for (int e = -3; e <= 3; ++e) g.C.push_back(std::pow(10.0, e));
  return g;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw PreconditionError("need at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, members] : by_class) {
    if (members.size() < folds) {
      throw PreconditionError(std::to_string(folds) + " folds exceed the " + std::to_string(members.size()) +
                              " members of class " + std::to_string(cls));
    }
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t position = 0;
  for (auto& [cls, members] : by_class) {
    shuffle(members, rng);
    for (auto m : members) out[position++ % folds].push_back(m);
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

CvReport cross_validate_precomputed(std::span<const KernelCandidate> candidates, std::span<const double> Cs,
                                    std::span<const int> labels, const CvOptions& options) {
  if (candidates.empty() || Cs.empty()) throw PreconditionError("cross-validation grid is empty");
  if (options.repeats == 0) throw PreconditionError("need at least one repeat");
  for (const auto& c : candidates) {
    if (static_cast<std::size_t>(c.gram.rows()) != labels.size() || c.gram.rows() != c.gram.cols()) {
      throw DimensionError("candidate Gram matrix does not match the label count");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  CvReport report;
  report.folds = options.folds;
  report.repeats = options.repeats;
  report.inner_folds = options.fixed ? 0 : options.inner_folds;
  report.seed = options.seed;
  report.fixed = options.fixed.has_value();

  std::vector<std::vector<std::vector<std::size_t>>> partitions;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    partitions.push_back(stratified_folds(labels, options.folds, options.seed + r));
  }

  report.table.resize(options.repeats * options.folds);
  parallel_for(report.table.size(), options.jobs, [&](std::size_t task) {
    const auto r = task / options.folds, f = task % options.folds;
    const auto& test = partitions[r][f];
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < options.folds; ++g) {
      if (g != f) train.insert(train.end(), partitions[r][g].begin(), partitions[r][g].end());
    }
    std::sort(train.begin(), train.end());

    FoldRecord record;
    record.repeat = r;
    record.fold = f;
    record.test_size = test.size();
    Selection chosen;
    if (!options.fixed && (candidates.size() > 1 || Cs.size() > 1)) {
      const auto inner_seed = splitmix64(options.seed ^ splitmix64(task + 1));
      chosen = select_parameters(candidates, Cs, labels, train, options, inner_seed);
      record.inner_accuracy = chosen.inner_accuracy;
    }
    const auto& candidate = candidates[chosen.candidate];
    const double C = Cs[chosen.c_index];
    record.chosen = {candidate.d, candidate.k, candidate.lambda, C};
    record.correct = count_correct(spectrum_clip(submatrix(candidate.gram, train, train)), pick(labels, train),
                                   submatrix(candidate.gram, test, train), pick(labels, test),
                                   {C, options.svm_tolerance});
    record.accuracy = static_cast<double>(record.correct) / static_cast<double>(test.size());
    report.table[task] = record;
  });

  std::vector<double> fold_acc;
  for (std::size_t r = 0; r < options.repeats; ++r) {
    std::vector<double> accs;
    for (std::size_t f = 0; f < options.folds; ++f) accs.push_back(report.table[r * options.folds + f].accuracy);
    report.repeat_means.push_back(mean_of(accs));
    fold_acc.insert(fold_acc.end(), accs.begin(), accs.end());
  }
  report.mean = mean_of(report.repeat_means);
  report.std_repeats = population_std(report.repeat_means);
  report.std_folds = population_std(fold_acc);
  report.timings.evaluation_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

CvReport cross_validate(const GraphDataset& dataset, Variant variant, const CvGrid& grid, const CvOptions& options) {
  if (!dataset.labeled) {
    throw PreconditionError("dataset '" + dataset.name + "' has no node labels; assign surrogate labels first");
  }
  const auto start = std::chrono::steady_clock::now();
  CvGrid effective = grid;
  if (options.fixed) {
    effective.d = {options.fixed->d};
    effective.k = {options.fixed->k};
    effective.lambda = {options.fixed->lambda};
    effective.C = {options.fixed->C};
  }
  if (variant == Variant::wsp) effective.k = {0};
  if (effective.C.empty()) throw PreconditionError("C grid is empty");
  if (variant != Variant::sp_baseline && (effective.d.empty() || effective.k.empty() || effective.lambda.empty())) {
    throw PreconditionError("d, k and lambda grids must be non-empty");
  }
  // Fail fast on fold counts before any kernel work.
  stratified_folds(dataset.class_labels, options.folds, options.seed);

  std::vector<KernelCandidate> candidates;
  std::vector<std::pair<std::size_t, std::size_t>> skipped;
  if (variant == Variant::sp_baseline) {
    candidates.push_back({0, 0, 0.0, sp_baseline_gram(dataset, options.jobs).values});
  } else {
    auto ds = effective.d, ks = effective.k;
    std::sort(ds.begin(), ds.end());
    std::sort(ks.begin(), ks.end());
    for (auto d : ds) {
      for (auto k : ks) {
        if (options.memory_limit_bytes > 0 && estimate_feature_bytes(dataset, d, k) > options.memory_limit_bytes) {
          skipped.emplace_back(d, k);
          continue;
        }
        const KernelConfig cfg{variant, d, k, 1.0};
        const auto dist = variant_distance_matrix(dataset, cfg, options.jobs);
        for (double lambda : effective.lambda) {
          candidates.push_back({d, k, lambda, laplacian_kernel(dist, lambda)});
        }
      }
    }
    if (candidates.empty()) throw PreconditionError("every (d, k) grid point exceeds the memory limit");
  }
  const double kernel_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto report = cross_validate_precomputed(candidates, effective.C, dataset.class_labels, options);
  report.dataset = dataset.name;
  report.variant = variant;
  report.grid = effective;
  report.skipped_scales = std::move(skipped);
  report.timings.kernel_seconds = kernel_seconds;
  return report;
}

nlohmann::json to_json(const CvReport& report) {
  using nlohmann::json;
  json out;
  out["dataset"] = report.dataset;
  out["variant"] = to_string(report.variant);
  out["folds"] = report.folds;
  out["repeats"] = report.repeats;
  out["inner_folds"] = report.inner_folds;
  out["seed"] = report.seed;
  out["mode"] = report.fixed ? "fixed" : "inner-cv";
  out["grid"] = {{"d", report.grid.d}, {"k", report.grid.k}, {"lambda", report.grid.lambda}, {"C", report.grid.C}};
  json skipped = json::array();
  for (const auto& [d, k] : report.skipped_scales) skipped.push_back({{"d", d}, {"k", k}});
  out["skipped_scales"] = skipped;
  json table = json::array();
  for (const auto& row : report.table) {
    json r = {{"repeat", row.repeat},
              {"fold", row.fold},
              {"test_size", row.test_size},
              {"correct", row.correct},
              {"accuracy", row.accuracy},
              {"chosen", {{"d", row.chosen.d}, {"k", row.chosen.k}, {"lambda", row.chosen.lambda}, {"C", row.chosen.C}}}};
    if (row.inner_accuracy) r["inner_accuracy"] = *row.inner_accuracy;
    table.push_back(std::move(r));
  }
  out["folds_table"] = table;
  out["repeat_means"] = report.repeat_means;
  out["mean"] = report.mean;
  out["std"] = report.std_repeats;
  out["std_folds"] = report.std_folds;
  return out;
}

nlohmann::json timings_json(const CvReport& report) {
  return {{"kernel_seconds", report.timings.kernel_seconds},
          {"evaluation_seconds", report.timings.evaluation_seconds}};
}

}  // namespace mwsp
