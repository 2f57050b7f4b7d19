#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "nodeclass/graph.hpp"

namespace fx {

using nodeclass::Edge;
using nodeclass::Graph;
using nodeclass::NodeId;

inline Graph make(std::size_t n, std::vector<Edge> edges) { return Graph::from_edges(n, edges); }

inline Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return make(n, e);
}

inline Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return make(n, e);
}

// Node 0 is the center.
inline Graph star(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId u = 1; u < n; ++u) e.emplace_back(0, u);
  return make(n, e);
}

// Triangle 0-1-2 with pendant 3 on node 0.
inline Graph paw() { return make(4, {{0, 1}, {1, 2}, {0, 2}, {0, 3}}); }

// Triangles 0-1-2 and 3-4-5 joined by the bridge 2-3.
inline Graph two_triangles() { return make(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}); }

inline Graph permuted(const Graph& g, const std::vector<NodeId>& perm) {
  std::vector<Edge> e;
  for (auto [u, v] : g.edges()) e.emplace_back(perm[u], perm[v]);
  return Graph::from_edges(g.num_nodes(), e);
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nodeclass_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

inline std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes graphs in the TU benchmark layout: NAME_A.txt, NAME_graph_indicator.txt
// and NAME_graph_labels.txt, all 1-indexed.
inline void write_tu(const std::filesystem::path& dir, const std::string& name, const std::vector<Graph>& graphs,
                     const std::vector<int>& labels) {
  std::ofstream a(dir / (name + "_A.txt")), ind(dir / (name + "_graph_indicator.txt")),
      lab(dir / (name + "_graph_labels.txt"));
  std::size_t offset = 1;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    for (std::size_t u = 0; u < graphs[i].num_nodes(); ++u) ind << i + 1 << '\n';
    for (auto [u, v] : graphs[i].edges()) {
      a << offset + u << ", " << offset + v << '\n';
      a << offset + v << ", " << offset + u << '\n';
    }
    lab << labels[i] << '\n';
    offset += graphs[i].num_nodes();
  }
}

inline void write_edges(const std::filesystem::path& p, const Graph& g) {
  std::ofstream out(p);
  out << "# nodes " << g.num_nodes() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace fx
