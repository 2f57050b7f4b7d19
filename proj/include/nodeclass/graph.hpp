#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nodeclass {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Counts of records discarded while building a simple graph.
struct BuildSummary {
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;

  std::size_t dropped() const { return self_loops + duplicates; }
};

/// Immutable undirected simple graph in compressed sparse row form.
///
/// Node ids are dense in [0, num_nodes()). Neighbor lists are sorted ascending,
/// so membership tests are logarithmic in the degree. Instances are safe to
/// share between threads.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Builds from an arbitrary edge list: self-loops and repeated pairs (in either
  // orientation) are dropped and tallied in `summary` when provided.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                          BuildSummary* summary = nullptr);

  std::size_t num_nodes() const { return offsets_.size() - 1; }
  std::size_t num_edges() const { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const;

  // Edges as (u, v) with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;
  std::vector<std::size_t> degree_sequence() const;

  // Subgraph induced by `nodes` (need not be sorted); node i of the result is nodes[i].
  Graph induced_subgraph(std::span<const NodeId> nodes) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
};

struct GraphStats {
  std::size_t n = 0;
  std::size_t m = 0;
  double avg_degree = 0.0;
  double density = 0.0;
  double transitivity = 0.0;
  std::size_t diameter = 0;
  // False when the graph is disconnected; diameter then refers to the largest component.
  bool connected = true;
};

struct GraphCollection {
  std::vector<Graph> graphs;
  std::vector<int> labels;
  std::vector<std::string> origin_ids;
  // Original label values, indexed by dense class id.
  std::vector<std::string> class_names;

  std::size_t size() const { return graphs.size(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Induced subgraph on the neighbors of `ego`, ego excluded.
Graph ego_network(const Graph& g, NodeId ego);

GraphStats graph_stats(const Graph& g);

std::size_t count_triangles(const Graph& g);

// Component id per node (dense, in order of lowest member) and component count.
std::pair<std::vector<std::uint32_t>, std::size_t> connected_components(const Graph& g);

// Hop distances from `source`; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source);

}  // namespace nodeclass
