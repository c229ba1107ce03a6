#pragma once

#include <filesystem>
#include <string>

#include "mwsp/graph.hpp"

namespace mwsp {

/// Reads NAME_A.txt, NAME_graph_indicator.txt, NAME_graph_labels.txt and, when
/// present, NAME_node_labels.txt from `directory`.
///
/// Node labels are remapped to 1..|alphabet| in order of first appearance.
/// Without a node-label file every node carries kUnsetLabel and the dataset is
/// flagged unlabeled. Edge weights and any other auxiliary files are ignored.
GraphDataset load_tudataset(const std::filesystem::path& directory, const std::string& name);

/// Writes the dataset in the same multi-file layout (each edge listed in both
/// directions, 1-based global node ids).
void write_tudataset(const GraphDataset& dataset, const std::filesystem::path& directory);

/// Resolves `<root>/<name>` when it exists, otherwise `root` itself.
std::filesystem::path resolve_dataset_dir(const std::filesystem::path& root, const std::string& name);

}  // namespace mwsp
