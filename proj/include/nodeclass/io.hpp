#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodeclass/graph.hpp"

namespace nodeclass {

struct LoadedGraph {
  Graph graph;
  // original_ids[i] is the file id of dense node i (shifted down by one when
  // the file is one-indexed).
  std::vector<std::int64_t> original_ids;
  BuildSummary summary;
};

/// Reads a whitespace-separated edge list. Lines starting with '#' are comments.
///
/// Nodes are relabeled to 0..n-1 in order of first appearance. Self-loops and
/// repeated edges are dropped and counted in `summary`. A leading
/// "# nodes <n>" header (as written by export_graph) switches to literal dense
/// ids in [0, n), which keeps isolated nodes and node order intact.
LoadedGraph load_edge_list(const std::filesystem::path& path, bool one_indexed = false);

/// Reads a TU benchmark dataset: <name>_A.txt, <name>_graph_indicator.txt and
/// <name>_graph_labels.txt from `dir`. Each undirected edge appears twice in the
/// A file and is folded into one. Labels become dense ids in sorted order of
/// the original values.
GraphCollection load_tu_dataset(const std::filesystem::path& dir, const std::string& name);

// Returns the companion score path used by export_graph for `edge_path`.
std::filesystem::path score_csv_path(const std::filesystem::path& edge_path);

// Writes `g` as an edge list (with a "# nodes" header) to `path`. When scores
// are non-empty a `node_id,score` CSV is written next to it.
void export_graph(const Graph& g, std::span<const double> scores, const std::filesystem::path& path);

// Shortest decimal form that round-trips a double.
std::string format_double(double x);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace nodeclass
