#include "nodeclass/community.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "nodeclass/random.hpp"

namespace nodeclass {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr double kMinGain = 1e-12;

// Weighted graph used at every aggregation level. Self-loop weight counts
// internal edges of the node and contributes twice to its strength.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> strength;
  double total_weight = 0.0;

  std::size_t size() const { return adj.size(); }
};

WeightedGraph from_graph(const Graph& g) {
  WeightedGraph w;
  const std::size_t n = g.num_nodes();
  w.adj.resize(n);
  w.self_loop.assign(n, 0.0);
  w.strength.assign(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) w.adj[u].emplace_back(v, 1.0);
    w.strength[u] = static_cast<double>(g.degree(u));
  }
  w.total_weight = static_cast<double>(g.num_edges());
  return w;
}

std::size_t relabel_dense(std::vector<std::uint32_t>& labels) {
  std::unordered_map<std::uint32_t, std::uint32_t> map;
  for (auto& l : labels) {
    auto [it, inserted] = map.try_emplace(l, static_cast<std::uint32_t>(map.size()));
    l = it->second;
  }
  return map.size();
}

// Sparse accumulator of edge weight from one node to each community.
class NeighborWeights {
 public:
  explicit NeighborWeights(std::size_t n) : weight_(n, 0.0), seen_(n, 0) {}

  void add(std::uint32_t c, double w) {
    if (!seen_[c]) {
      seen_[c] = 1;
      touched_.push_back(c);
    }
    weight_[c] += w;
  }
  double get(std::uint32_t c) const { return weight_[c]; }
  const std::vector<std::uint32_t>& touched() const { return touched_; }
  void clear() {
    for (auto c : touched_) {
      weight_[c] = 0.0;
      seen_[c] = 0;
    }
    touched_.clear();
  }

 private:
  std::vector<double> weight_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::uint32_t> touched_;
};

// Queue-based local moving. Returns the number of node moves.
std::size_t move_nodes_fast(const WeightedGraph& g, std::vector<std::uint32_t>& comm, double gamma, Rng& rng) {
  const std::size_t n = g.size();
  const double m = g.total_weight;
  std::vector<double> comm_strength(n, 0.0);
  std::vector<std::size_t> comm_size(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    comm_strength[comm[i]] += g.strength[i];
    ++comm_size[comm[i]];
  }
  std::vector<std::uint32_t> empty;
  for (std::size_t c = n; c-- > 0;)
    if (comm_size[c] == 0) empty.push_back(static_cast<std::uint32_t>(c));

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  shuffle(order, rng);
  std::vector<std::uint32_t> queue(order.begin(), order.end());
  std::vector<std::uint8_t> queued(n, 1);
  std::size_t head = 0;
  std::size_t moves = 0;
  NeighborWeights nw(n);

  while (head < queue.size()) {
    const std::uint32_t i = queue[head++];
    queued[i] = 0;
    if (head > n && head * 2 > queue.size()) {
      queue.erase(queue.begin(), queue.begin() + static_cast<std::ptrdiff_t>(head));
      head = 0;
    }
    const std::uint32_t from = comm[i];
    const double ki = g.strength[i];
    for (auto [j, w] : g.adj[i]) nw.add(comm[j], w);

    comm_strength[from] -= ki;
    --comm_size[from];
    auto gain = [&](std::uint32_t c) { return nw.get(c) / m - gamma * ki * comm_strength[c] / (2.0 * m * m); };

    std::uint32_t best = from;
    double best_gain = gain(from);
    for (auto c : nw.touched()) {
      if (c == from) continue;
      const double gc = gain(c);
      if (gc > best_gain + kMinGain) {
        best = c;
        best_gain = gc;
      }
    }
    // An empty community has gain zero.
    if (comm_size[from] > 0 && 0.0 > best_gain + kMinGain && !empty.empty()) {
      best = empty.back();
      best_gain = 0.0;
    }
    if (best == from) {
      comm_strength[from] += ki;
      ++comm_size[from];
    } else {
      if (comm_size[best] == 0) empty.pop_back();
      if (comm_size[from] == 0) empty.push_back(from);
      comm_strength[best] += ki;
      ++comm_size[best];
      comm[i] = best;
      ++moves;
      for (auto [j, w] : g.adj[i])
        if (!queued[j] && comm[j] != best) {
          queued[j] = 1;
          queue.push_back(j);
        }
    }
    nw.clear();
  }
  return moves;
}

// Splits each community of `comm` into well-connected subcommunities by
// greedily merging singletons. Returns dense refined labels.
std::vector<std::uint32_t> refine(const WeightedGraph& g, const std::vector<std::uint32_t>& comm,
                                  std::size_t num_comms, double gamma, Rng& rng) {
  const std::size_t n = g.size();
  const double m = g.total_weight;
  std::vector<std::uint32_t> refined(n);
  std::iota(refined.begin(), refined.end(), 0u);
  std::vector<double> ref_strength(g.strength);
  // Weight between a refined community and the rest of its parent community.
  std::vector<double> ref_cut(n, 0.0);
  std::vector<std::uint8_t> singleton(n, 1);
  std::vector<double> parent_strength(num_comms, 0.0);
  std::vector<std::vector<std::uint32_t>> members(num_comms);
  for (std::uint32_t i = 0; i < n; ++i) {
    parent_strength[comm[i]] += g.strength[i];
    members[comm[i]].push_back(i);
  }
  std::vector<double> weight_in_parent(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i)
    for (auto [j, w] : g.adj[i])
      if (comm[j] == comm[i]) weight_in_parent[i] += w;
  for (std::uint32_t i = 0; i < n; ++i) ref_cut[i] = weight_in_parent[i];

  NeighborWeights nw(n);
  for (auto& nodes : members) {
    if (nodes.size() < 2) continue;
    shuffle(nodes, rng);
    const double ks = parent_strength[comm[nodes.front()]];
    for (const std::uint32_t i : nodes) {
      if (!singleton[refined[i]]) continue;
      const double ki = g.strength[i];
      if (weight_in_parent[i] < gamma * ki * (ks - ki) / (2.0 * m)) continue;

      for (auto [j, w] : g.adj[i])
        if (comm[j] == comm[i]) nw.add(refined[j], w);
      const std::uint32_t own = refined[i];
      ref_strength[own] -= ki;
      std::uint32_t best = own;
      double best_gain = 0.0;
      for (auto c : nw.touched()) {
        if (c == own) continue;
        if (ref_cut[c] < gamma * ref_strength[c] * (ks - ref_strength[c]) / (2.0 * m)) continue;
        const double gc = nw.get(c) / m - gamma * ki * ref_strength[c] / (2.0 * m * m);
        if (gc > best_gain + kMinGain) {
          best = c;
          best_gain = gc;
        }
      }
      if (best == own) {
        ref_strength[own] += ki;
      } else {
        ref_cut[best] += weight_in_parent[i] - 2.0 * nw.get(best);
        ref_strength[best] += ki;
        ref_cut[own] = 0.0;
        refined[i] = best;
        singleton[best] = 0;
      }
      nw.clear();
    }
  }
  relabel_dense(refined);
  return refined;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& refined, std::size_t count) {
  WeightedGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  out.strength.assign(count, 0.0);
  out.total_weight = g.total_weight;
  std::vector<std::vector<std::uint32_t>> members(count);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    const auto r = refined[i];
    members[r].push_back(i);
    out.strength[r] += g.strength[i];
    out.self_loop[r] += g.self_loop[i];
  }
  NeighborWeights nw(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    for (auto i : members[r])
      for (auto [j, w] : g.adj[i]) {
        const auto rj = refined[j];
        if (rj == r) out.self_loop[r] += w / 2.0;  // seen from both endpoints
        else nw.add(rj, w);
      }
    for (auto c : nw.touched()) out.adj[r].emplace_back(c, nw.get(c));
    std::sort(out.adj[r].begin(), out.adj[r].end());
    nw.clear();
  }
  return out;
}

// One full multilevel pass starting from the base graph. Returns true if any node moved.
bool leiden_pass(const WeightedGraph& base, std::vector<std::uint32_t>& membership, double gamma, Rng& rng) {
  WeightedGraph level = base;
  std::vector<std::uint32_t> comm = membership;
  relabel_dense(comm);
  std::vector<std::uint32_t> base_to_level(base.size());
  std::iota(base_to_level.begin(), base_to_level.end(), 0u);
  bool moved = false;

  for (;;) {
    moved |= move_nodes_fast(level, comm, gamma, rng) > 0;
    const std::size_t num_comms = relabel_dense(comm);
    if (num_comms == level.size()) break;
    const auto refined = refine(level, comm, num_comms, gamma, rng);
    const std::size_t num_refined = *std::max_element(refined.begin(), refined.end()) + 1;
    if (num_refined == level.size()) break;

    std::vector<std::uint32_t> next_comm(num_refined, kNone);
    for (std::size_t i = 0; i < level.size(); ++i) next_comm[refined[i]] = comm[i];
    for (auto& x : base_to_level) x = refined[x];
    level = aggregate(level, refined, num_refined);
    comm = std::move(next_comm);
  }
  for (std::size_t i = 0; i < base.size(); ++i) membership[i] = comm[base_to_level[i]];
  return moved;
}

}  // namespace

Partition make_partition(const std::vector<std::uint32_t>& labels) {
  Partition p;
  p.assignment = labels;
  p.num_communities = relabel_dense(p.assignment);
  return p;
}

Partition detect_communities(const Graph& g, double resolution, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw std::invalid_argument("detect_communities: empty graph");
  std::vector<std::uint32_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0u);
  if (g.num_edges() > 0) {
    const WeightedGraph base = from_graph(g);
    Rng rng(seed);
    // Each pass strictly increases modularity, so this terminates; the cap guards
    // against rounding-level cycling.
    for (int pass = 0; pass < 1000 && leiden_pass(base, membership, resolution, rng); ++pass) {
    }
  }
  return make_partition(membership);
}

double modularity(const Graph& g, const Partition& p, double resolution) {
  const double m = static_cast<double>(g.num_edges());
  if (m == 0.0) throw std::invalid_argument("modularity: graph has no edges");
  if (p.assignment.size() != g.num_nodes()) throw std::invalid_argument("modularity: partition size mismatch");
  const std::size_t c = p.num_communities;
  std::vector<double> internal(c, 0.0), total(c, 0.0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto cu = p.assignment[u];
    total[cu] += static_cast<double>(g.degree(u));
    for (NodeId v : g.neighbors(u))
      if (u < v && p.assignment[v] == cu) internal[cu] += 1.0;
  }
  double q = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const double share = total[k] / (2.0 * m);
    q += internal[k] / m - resolution * share * share;
  }
  return q;
}

std::string partition_csv(const Partition& p) {
  std::ostringstream out;
  out << "node_id,community_id\n";
  for (std::size_t i = 0; i < p.assignment.size(); ++i) out << i << ',' << p.assignment[i] << '\n';
  return out.str();
}

}  // namespace nodeclass
