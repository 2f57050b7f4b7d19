#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nodeclass/forest.hpp"
#include "nodeclass/graph.hpp"
#include "nodeclass/random.hpp"

namespace nodeclass {

enum class Attachment { kVertexCopy, kTriadicClosure };

std::string_view attachment_name(Attachment a);
// Accepts vertex-copy / triadic-closure, case and separator insensitive.
Attachment parse_attachment(std::string_view s);

// Mutable simple graph used while growing. Neighbor lists stay sorted.
class GrowingGraph {
 public:
  GrowingGraph() = default;
  explicit GrowingGraph(const Graph& g);

  std::size_t num_nodes() const { return adj_.size(); }
  std::size_t num_edges() const { return edges_; }
  std::span<const NodeId> neighbors(NodeId u) const { return adj_[u]; }
  std::size_t degree(NodeId u) const { return adj_[u].size(); }

  // Appends a node wired to `friends` (distinct existing ids) and returns its id.
  NodeId add_node(std::span<const NodeId> friends);
  // Deletes flagged nodes with their edges; survivors keep their relative order.
  void remove_nodes(const std::vector<bool>& drop);
  Graph to_graph() const;

 private:
  std::vector<std::vector<NodeId>> adj_;
  std::size_t edges_ = 0;
};

struct AttachResult {
  bool attached = false;
  NodeId node = 0;
  std::size_t target_degree = 0;
  std::size_t trials = 0;
};

// max_trials <= 0 selects 10 x target degree.
AttachResult vertex_copy_attach(GrowingGraph& g, double beta, int max_trials, Rng& rng);
AttachResult triadic_closure_attach(GrowingGraph& g, double beta, std::span<const std::size_t> degrees,
                                    std::size_t target_n, int max_trials, Rng& rng);

struct GrowthConfig {
  double beta = 0.9;
  Attachment attachment = Attachment::kVertexCopy;
  double growth_rate = 0.05;
  double score_threshold = 0.8;
  std::size_t max_iterations = 500;
  // 0 takes the size of the original network.
  std::size_t target_n = 0;
  int max_trials = 0;
  bool rescore_lightweight = false;
  std::size_t stall_iterations = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class GrowthStatus { kReachedTarget, kMaxIterations, kStalled };
std::string_view growth_status_name(GrowthStatus s);

struct GrowthRecord {
  std::size_t iteration = 0;
  std::size_t n_before = 0;
  std::size_t added = 0;
  std::size_t pruned = 0;
  std::size_t n_after = 0;
  double mean_score = 0.0;
  // Lowest score among survivors, 1 when none survive.
  double min_surviving_score = 1.0;
  std::size_t failed_attachments = 0;
};

struct GrowthTrace {
  std::vector<GrowthRecord> records;
  GrowthStatus status = GrowthStatus::kMaxIterations;
  std::size_t target_n = 0;

  std::string to_csv() const;
};

struct GrowthResult {
  Graph graph;
  GrowthTrace trace;
};

// Called after every iteration with the record and the pruned graph.
using GrowthObserver = std::function<void(const GrowthRecord&, const Graph&)>;

/// Grows `seed_graph` towards the size of `original`. Each iteration attaches
/// ceil(n * growth_rate) nodes, rescores every node with `classifier` (class 0
/// is "real") and removes at once all nodes scoring below the threshold.
GrowthResult grow_network(const Graph& seed_graph, const Graph& original, const ForestModel& classifier,
                          const GrowthConfig& cfg, const GrowthObserver& observer = {});

// Original network (class 0) against one configuration-model twin (class 1).
ForestModel train_growth_classifier(const Graph& original, bool lightweight, TrainConfig cfg, std::uint64_t seed);

// Ego network of a uniformly chosen node whose ego network has at least
// `min_nodes` nodes; falls back to the largest-degree node.
Graph select_seed_ego(const Graph& original, std::size_t min_nodes, std::uint64_t seed);

}  // namespace nodeclass
