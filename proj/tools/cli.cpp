#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mwsp/cross_validation.hpp"
#include "mwsp/error.hpp"
#include "mwsp/kernels.hpp"
#include "mwsp/oracles.hpp"
#include "mwsp/parallel.hpp"
#include "mwsp/tudataset.hpp"
#include "mwsp/wasserstein.hpp"

namespace mwsp::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct UsageError : Error {
  using Error::Error;
};

struct RunConfig {
  std::string dataset;
  std::string data_root = ".";
  std::string labels;  // "", "degree" or "uniform"
  std::string variant = "mwsp";
  std::size_t d = 1;
  std::size_t k = 0;
  double lambda = 1.0;
  std::size_t folds = 10;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out;
  std::size_t memory_limit_mb = 4096;
  bool per_graph_mean = false;
  std::vector<std::string> fixed;
  std::vector<std::size_t> grid_d, grid_k;
  std::vector<double> grid_lambda, grid_C;
  // oracle
  std::size_t instances = 200;
  std::size_t max_rows = 8;
  std::size_t trees = 1000;
  bool inject_sign_flip = false;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open output file " + path.string());
  file << content;
  if (!file) throw UsageError("failed writing " + path.string());
}

fs::path with_suffix(fs::path path, const std::string& suffix) {
  path.replace_extension();
  path += suffix;
  return path;
}

GraphDataset load(const RunConfig& cfg, bool need_labels, std::ostream& err) {
  if (cfg.dataset.empty()) throw UsageError("--dataset is required");
  auto ds = load_tudataset(resolve_dataset_dir(cfg.data_root, cfg.dataset), cfg.dataset);
  if (!cfg.labels.empty()) {
    if (ds.labeled) {
      err << "warning: " << cfg.dataset << " has node labels; --labels " << cfg.labels << " ignored\n";
    } else {
      ds = assign_surrogate_labels(ds, cfg.labels == "degree" ? SurrogateMode::degree : SurrogateMode::uniform);
    }
  } else if (need_labels && !ds.labeled) {
    throw UsageError(cfg.dataset + " has no node labels; pass --labels degree or --labels uniform");
  }
  return ds;
}

Variant variant_of(const RunConfig& cfg) {
  const auto v = parse_variant(cfg.variant);
  if (!v) throw UsageError("unknown variant '" + cfg.variant + "' (mwsp, wsp, mwsp-gfm, sp)");
  return *v;
}

void memory_guard(const GraphDataset& ds, std::size_t d, std::size_t k, std::size_t limit_mb) {
  if (limit_mb == 0) return;
  const auto bytes = estimate_feature_bytes(ds, d, k);
  const auto limit = limit_mb * 1024 * 1024;
  if (bytes <= limit) return;
  std::ostringstream msg;
  msg << "projected feature memory " << (bytes >> 20) << " MiB for d=" << d << " k=" << k << " exceeds --memory-limit-mb "
      << limit_mb;
  std::size_t smaller = k;
  while (smaller > 0 && estimate_feature_bytes(ds, d, smaller - 1) > limit) --smaller;
  if (smaller > 0) msg << "; try --k " << smaller - 1;
  throw PreconditionError(msg.str());
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ds = load(cfg, false, err);
  const auto stats = dataset_statistics(ds, cfg.per_graph_mean ? SpMeanMode::per_graph : SpMeanMode::pooled);
  nlohmann::json j = {{"dataset", ds.name},
                      {"size", stats.size},
                      {"classes", stats.class_count},
                      {"avg_nodes", stats.avg_nodes},
                      {"avg_edges", stats.avg_edges},
                      {"node_labels", stats.node_label_count},
                      {"mean_sp", stats.mean_sp_length},
                      {"max_sp", stats.max_sp_length},
                      {"sp_mean_mode", cfg.per_graph_mean ? "per_graph" : "pooled"}};
  out << j.dump() << "\n";
  out << std::left << std::setw(12) << "dataset" << std::right << std::setw(7) << "size" << std::setw(9) << "classes"
      << std::setw(11) << "avg_nodes" << std::setw(11) << "avg_edges" << std::setw(8) << "labels" << std::setw(9)
      << "mean_sp" << std::setw(8) << "max_sp" << "\n";
  out << std::left << std::setw(12) << ds.name << std::right << std::setw(7) << stats.size << std::setw(9)
      << stats.class_count << std::fixed << std::setprecision(2) << std::setw(11) << stats.avg_nodes << std::setw(11)
      << stats.avg_edges << std::setw(8) << stats.node_label_count << std::setw(9) << stats.mean_sp_length
      << std::setw(8) << stats.max_sp_length << "\n";
  out.unsetf(std::ios::floatfield);
  if (!cfg.out.empty()) write_file(cfg.out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_gram(const RunConfig& cfg, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const auto variant = variant_of(cfg);
  const auto ds = load(cfg, true, err);
  const auto start = Clock::now();
  GramMatrix gram;
  if (variant == Variant::sp_baseline) {
    if (sub.count("--d") || sub.count("--k") || sub.count("--lambda"))
      err << "warning: SP-baseline ignores --d, --k and --lambda\n";
    gram = sp_baseline_gram(ds, cfg.jobs);
  } else {
    KernelConfig kc{variant, cfg.d, cfg.k, cfg.lambda};
    kc.validate();
    if (variant == Variant::wsp && sub.count("--k") && cfg.k != 0) err << "warning: WSP uses a single scale; --k ignored\n";
    kc = kc.effective();
    memory_guard(ds, kc.d, kc.k, cfg.memory_limit_mb);
    gram = build_gram(ds, kc, cfg.jobs);
  }
  const double elapsed = seconds_since(start);

  std::ostringstream csv;
  write_gram_csv(csv, gram.values);
  auto meta = gram_metadata(gram);
  meta["format"] = "csv, one row per line, comma separated, %.17g";
  if (!cfg.labels.empty() && !ds.labeled) meta["surrogate_labels"] = cfg.labels;
  if (cfg.out.empty()) {
    out << csv.str();
  } else {
    const fs::path path(cfg.out);
    write_file(path, csv.str());
    write_file(with_suffix(path, ".json"), meta.dump(2) + "\n");
    write_file(with_suffix(path, ".timing.json"),
               nlohmann::json{{"kernel_seconds", elapsed}, {"jobs", cfg.jobs}}.dump(2) + "\n");
    out << "wrote " << path.string() << " (" << gram.values.rows() << "x" << gram.values.cols() << ")\n";
  }
  return kExitOk;
}

Hyperparameters parse_fixed(const std::vector<std::string>& tokens, Variant variant) {
  Hyperparameters hp;
  bool has_d = false, has_k = false, has_lambda = false, has_C = false;
  std::vector<std::string> parts;
  for (const auto& t : tokens) {
    std::string piece;
    for (char ch : t + " ") {
      if (ch == ' ' || ch == ',') {
        if (!piece.empty()) parts.push_back(piece);
        piece.clear();
      } else {
        piece += ch;
      }
    }
  }
  for (const auto& p : parts) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw UsageError("--fixed expects key=value, got '" + p + "'");
    const auto key = p.substr(0, eq);
    const auto value = p.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "d") {
        hp.d = std::stoul(value, &used);
        has_d = true;
      } else if (key == "k") {
        hp.k = std::stoul(value, &used);
        has_k = true;
      } else if (key == "lambda") {
        hp.lambda = std::stod(value, &used);
        has_lambda = true;
      } else if (key == "C") {
        hp.C = std::stod(value, &used);
        has_C = true;
      } else {
        throw UsageError("--fixed: unknown key '" + key + "'");
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw UsageError("--fixed: bad value for " + key + ": '" + value + "'");
    }
  }
  if (!has_C) throw UsageError("--fixed needs C=..");
  if (variant != Variant::sp_baseline) {
    if (!has_d || !has_lambda) throw UsageError("--fixed needs d=.. lambda=.. C=.. (and k=.. for multi-scale variants)");
    if (!has_k && variant != Variant::wsp) throw UsageError("--fixed needs k=..");
  }
  if (variant == Variant::wsp) hp.k = 0;
  return hp;
}

int cmd_cv(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto variant = variant_of(cfg);
  const auto ds = load(cfg, true, err);
  CvGrid grid = CvGrid::full();
  if (!cfg.grid_d.empty()) grid.d = cfg.grid_d;
  if (!cfg.grid_k.empty()) grid.k = cfg.grid_k;
  if (!cfg.grid_lambda.empty()) grid.lambda = cfg.grid_lambda;
  if (!cfg.grid_C.empty()) grid.C = cfg.grid_C;

  CvOptions options;
  options.folds = cfg.folds;
  options.repeats = cfg.repeats;
  options.seed = cfg.seed;
  options.jobs = cfg.jobs;
  options.memory_limit_bytes = cfg.memory_limit_mb * 1024 * 1024;
  if (!cfg.fixed.empty()) options.fixed = parse_fixed(cfg.fixed, variant);

  const auto start = Clock::now();
  const auto report = cross_validate(ds, variant, grid, options);
  for (const auto& [d, k] : report.skipped_scales)
    err << "warning: skipped d=" << d << " k=" << k << " (over --memory-limit-mb)\n";
  const auto body = to_json(report).dump(2) + "\n";
  auto timing = timings_json(report);
  timing["total_seconds"] = seconds_since(start);
  timing["jobs"] = cfg.jobs;
  if (cfg.out.empty()) {
    out << body;
  } else {
    const fs::path path(cfg.out);
    write_file(path, body);
    write_file(with_suffix(path, ".timing.json"), timing.dump(2) + "\n");
  }
  std::ostringstream line;
  line << std::fixed << std::setprecision(4) << report.dataset << " " << to_string(report.variant)
       << ": mean accuracy " << report.mean << " +- " << report.std_repeats << " (repeats), +- " << report.std_folds
       << " (folds)\n";
  (cfg.out.empty() ? err : out) << line.str();
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  oracle::SuiteOptions options;
  options.transport_instances = cfg.instances;
  options.max_rows = cfg.max_rows;
  options.tree_samples = cfg.trees;
  options.seed = cfg.seed;
  if (cfg.max_rows * cfg.max_rows > oracle::kMaxOracleCells) {
    throw PreconditionError("oracle request refused: " + std::to_string(cfg.max_rows) + "x" +
                            std::to_string(cfg.max_rows) + " exceeds the " +
                            std::to_string(oracle::kMaxOracleCells) + "-cell cap");
  }
  if (cfg.inject_sign_flip) {
    options.ground_distance = [](const SparseRow& a, const SparseRow& b) { return -ground_distance(a, b); };
  }
  GraphDataset ds;
  if (!cfg.dataset.empty()) {
    ds = load(cfg, true, err);
    options.dataset = &ds;
  }
  const auto checks = oracle::run_suite(options);
  bool all = true;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    all = all && c.passed;
  }
  return all ? kExitOk : kExitInternal;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-scale Wasserstein shortest-path graph kernels"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--dataset", cfg.dataset, "Dataset name (TU format files NAME_A.txt, ...)");
    sub->add_option("--data-root", cfg.data_root, "Directory holding NAME/ or the NAME_*.txt files")
        ->envname("MWSP_DATA_ROOT");
    sub->add_option("--labels", cfg.labels, "Surrogate node labels for unlabeled datasets")
        ->check(CLI::IsMember({"degree", "uniform"}));
  };
  auto add_jobs = [&](CLI::App* sub) {
    sub->add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)");
  };
  auto add_kernel = [&](CLI::App* sub) {
    sub->add_option("--variant", cfg.variant, "mwsp, wsp, mwsp-gfm or sp");
    sub->add_option("--memory-limit-mb", cfg.memory_limit_mb, "Refuse (d, k) whose feature estimate exceeds this (0 = off)");
  };

  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  add_data(stats);
  stats->add_flag("--per-graph-mean", cfg.per_graph_mean, "Average each graph's mean SP length instead of pooling all pairs");
  stats->add_option("--out", cfg.out, "Also write the JSON row here");

  auto* gram = app.add_subcommand("gram", "Compute one Gram matrix");
  add_data(gram);
  add_kernel(gram);
  add_jobs(gram);
  gram->add_option("--d", cfg.d, "Truncated BFS depth");
  gram->add_option("--k", cfg.k, "Highest label scale");
  gram->add_option("--lambda", cfg.lambda, "Laplacian kernel bandwidth");
  gram->add_option("--out", cfg.out, "CSV path; sidecars get .json and .timing.json");

  auto* cv = app.add_subcommand("cv", "Repeated stratified cross-validation");
  add_data(cv);
  add_kernel(cv);
  add_jobs(cv);
  cv->add_option("--folds", cfg.folds, "Outer folds");
  cv->add_option("--repeats", cfg.repeats, "Repetitions");
  cv->add_option("--seed", cfg.seed, "Base seed");
  cv->add_option("--fixed", cfg.fixed, "Skip inner selection: d=.. k=.. lambda=.. C=..");
  cv->add_option("--grid-d", cfg.grid_d, "Depth grid")->delimiter(',');
  cv->add_option("--grid-k", cfg.grid_k, "Scale grid")->delimiter(',');
  cv->add_option("--grid-lambda", cfg.grid_lambda, "Bandwidth grid")->delimiter(',');
  cv->add_option("--grid-C", cfg.grid_C, "SVM C grid")->delimiter(',');
  cv->add_option("--out", cfg.out, "Report path; timings go to .timing.json beside it");

  auto* orc = app.add_subcommand("oracle", "Run the reference-implementation checks");
  add_data(orc);
  orc->add_option("--instances", cfg.instances, "Random transport instances");
  orc->add_option("--max-rows", cfg.max_rows, "Largest row count per side");
  orc->add_option("--trees", cfg.trees, "Random rooted trees");
  orc->add_option("--seed", cfg.seed, "Seed");
  orc->add_flag("--inject-sign-flip", cfg.inject_sign_flip, "Negate the ground distance (fault injection)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*stats) return cmd_stats(cfg, out, err);
    if (*gram) return cmd_gram(cfg, *gram, out, err);
    if (*cv) return cmd_cv(cfg, out, err);
    if (*orc) return cmd_oracle(cfg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace mwsp::cli
