#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "mwsp/canonical.hpp"
#include "mwsp/features.hpp"
#include "mwsp/paths.hpp"
#include "mwsp/tudataset.hpp"

namespace support {

inline std::filesystem::path data_dir() { return MWSP_TEST_DATA; }

inline mwsp::GraphDataset fig2() { return mwsp::load_tudataset(data_dir() / "FIG2", "FIG2"); }
inline mwsp::GraphDataset mutag() { return mwsp::load_tudataset(data_dir() / "MUTAG", "MUTAG"); }

// Node positions inside the two fixture graphs.
namespace g1 {
inline constexpr mwsp::NodeId B = 0, D = 1, C = 2, A = 3, E = 4, G = 5;
}
namespace g2 {
inline constexpr mwsp::NodeId A = 0, B = 1, C = 2, D = 3, E = 4, G = 5;
}

inline std::string join(const std::vector<mwsp::Label>& seq) {
  std::string s;
  for (std::size_t i = 0; i < seq.size(); ++i) s += (i ? "," : "") + std::to_string(seq[i]);
  return s;
}

inline std::vector<std::string> path_strings(const std::vector<mwsp::Path>& paths, std::span<const mwsp::Label> labels) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    std::vector<mwsp::Label> seq;
    for (auto v : p) seq.push_back(labels[v]);
    out.push_back(join(seq));
  }
  return out;
}

inline mwsp::Graph make_graph(std::size_t n, std::vector<std::pair<mwsp::NodeId, mwsp::NodeId>> edges,
                              std::vector<mwsp::Label> labels) {
  return mwsp::Graph::from_edges(n, edges, std::move(labels));
}

inline mwsp::GraphDataset dataset_of(std::vector<mwsp::Graph> graphs, std::vector<int> classes = {}) {
  mwsp::GraphDataset ds;
  ds.name = "toy";
  if (classes.empty()) classes.assign(graphs.size(), 0);
  ds.graphs = std::move(graphs);
  ds.class_labels = std::move(classes);
  return ds;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("mwsp_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace support
