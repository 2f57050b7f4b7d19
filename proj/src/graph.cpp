#include "nodeclass/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace nodeclass {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges, BuildSummary* summary) {
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  std::size_t loops = 0;
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) throw std::out_of_range("edge endpoint out of range");
    if (u == v) {
      ++loops;
      continue;
    }
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  const auto unique_end = std::unique(canon.begin(), canon.end());
  const std::size_t dups = static_cast<std::size_t>(canon.end() - unique_end);
  canon.erase(unique_end, canon.end());
  if (summary) {
    summary->self_loops += loops;
    summary->duplicates += dups;
  }

  Graph g;
  g.offsets_.assign(num_nodes + 1, 0);
  for (auto [u, v] : canon) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.adjacency_.resize(2 * canon.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // canon is sorted by (u, v): each list receives its lower neighbors (as v) before
  // its higher ones (as u), both ascending, so lists come out sorted.
  for (auto [u, v] : canon) {
    g.adjacency_[cursor[u]++] = v;
    g.adjacency_[cursor[v]++] = u;
  }
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u)
    for (NodeId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::vector<std::size_t> Graph::degree_sequence() const {
  std::vector<std::size_t> deg(num_nodes());
  for (NodeId u = 0; u < num_nodes(); ++u) deg[u] = degree(u);
  return deg;
}

Graph Graph::induced_subgraph(std::span<const NodeId> nodes) const {
  constexpr NodeId kAbsent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> local(num_nodes(), kAbsent);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
  std::vector<Edge> sub;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (NodeId w : neighbors(nodes[i])) {
      const NodeId j = local[w];
      if (j != kAbsent && i < j) sub.emplace_back(static_cast<NodeId>(i), j);
    }
  return from_edges(nodes.size(), sub);
}

Graph ego_network(const Graph& g, NodeId ego) {
  if (ego >= g.num_nodes()) throw std::out_of_range("ego node out of range");
  const auto nb = g.neighbors(ego);
  return g.induced_subgraph(nb);
}

std::size_t count_triangles(const Graph& g) {
  // Each triangle u < v < w is found once from its lowest edge (u, v).
  std::size_t triangles = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto nu = g.neighbors(u);
    for (NodeId v : nu) {
      if (v <= u) continue;
      const auto nv = g.neighbors(v);
      auto a = std::upper_bound(nu.begin(), nu.end(), v);
      auto b = std::upper_bound(nv.begin(), nv.end(), v);
      while (a != nu.end() && b != nv.end()) {
        if (*a < *b) ++a;
        else if (*b < *a) ++b;
        else {
          ++triangles;
          ++a;
          ++b;
        }
      }
    }
  }
  return triangles;
}

std::pair<std::vector<std::uint32_t>, std::size_t> connected_components(const Graph& g) {
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp(g.num_nodes(), kUnset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId w : g.neighbors(u))
        if (comp[w] == kUnset) {
          comp[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return {std::move(comp), next};
}

std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source) {
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.num_nodes(), kInf);
  std::vector<NodeId> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId w : g.neighbors(u))
      if (dist[w] == kInf) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

GraphStats graph_stats(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw std::invalid_argument("graph_stats: graph has no nodes");
  GraphStats s;
  s.n = n;
  s.m = g.num_edges();
  s.avg_degree = 2.0 * static_cast<double>(s.m) / static_cast<double>(n);
  s.density = n < 2 ? 0.0 : 2.0 * static_cast<double>(s.m) / (static_cast<double>(n) * static_cast<double>(n - 1));

  double triples = 0.0;
  for (NodeId u = 0; u < n; ++u) {
    const double k = static_cast<double>(g.degree(u));
    triples += k * (k - 1.0) / 2.0;
  }
  s.transitivity = triples > 0.0 ? 3.0 * static_cast<double>(count_triangles(g)) / triples : 0.0;

  const auto [comp, num_comp] = connected_components(g);
  s.connected = num_comp <= 1;
  std::vector<std::size_t> comp_size(num_comp, 0);
  for (auto c : comp) ++comp_size[c];
  const auto largest = static_cast<std::uint32_t>(
      std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
  std::size_t diameter = 0;
  for (NodeId u = 0; u < n; ++u) {
    if (comp[u] != largest) continue;
    for (std::size_t d : bfs_distances(g, u))
      if (d != std::numeric_limits<std::size_t>::max()) diameter = std::max(diameter, d);
  }
  s.diameter = diameter;
  return s;
}

}  // namespace nodeclass
