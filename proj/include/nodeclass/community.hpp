#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodeclass/graph.hpp"

namespace nodeclass {

struct Partition {
  // Community id per node, dense in [0, num_communities).
  std::vector<std::uint32_t> assignment;
  std::size_t num_communities = 0;
};

inline constexpr double kDefaultResolution = 1.0;

// Relabels arbitrary community ids densely in order of first appearance.
Partition make_partition(const std::vector<std::uint32_t>& labels);

/// Leiden community detection maximizing modularity at `resolution`.
///
/// Each pass runs queue-based local moving, refines every community into
/// well-connected subcommunities, and aggregates the refined partition;
/// passes repeat until one makes no move. Node visit order is shuffled from
/// `seed`, so the result is reproducible per seed. On return no single node
/// can move to a neighboring community and raise modularity.
Partition detect_communities(const Graph& g, double resolution = kDefaultResolution, std::uint64_t seed = 0);

// Newman-Girvan modularity with resolution. Throws when the graph has no edges.
double modularity(const Graph& g, const Partition& p, double resolution = kDefaultResolution);

std::string partition_csv(const Partition& p);

}  // namespace nodeclass
