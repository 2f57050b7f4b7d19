#include "nodeclass/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "nodeclass/random.hpp"

namespace nodeclass {
namespace {

std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Adjacency that supports insertion during generation.
class GrowingGraph {
 public:
  explicit GrowingGraph(std::size_t n) : adj_(n) {}

  bool linked(NodeId u, NodeId v) const {
    const auto& a = adj_[u];
    return std::find(a.begin(), a.end(), v) != a.end();
  }
  void link(NodeId u, NodeId v) {
    adj_[u].push_back(v);
    adj_[v].push_back(u);
    edges_.emplace_back(u, v);
  }
  const std::vector<NodeId>& neighbors(NodeId u) const { return adj_[u]; }
  Graph build() const { return Graph::from_edges(adj_.size(), edges_); }

 private:
  std::vector<std::vector<NodeId>> adj_;
  std::vector<Edge> edges_;
};

std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '-' && c != '_' && c != ' ') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

// Seeds a clique on the first `size` nodes and records every endpoint in the
// degree-proportional target list.
void seed_clique(GrowingGraph& g, std::size_t size, std::vector<NodeId>& repeated) {
  for (NodeId u = 0; u < size; ++u)
    for (NodeId v = u + 1; v < size; ++v) {
      g.link(u, v);
      repeated.push_back(u);
      repeated.push_back(v);
    }
}

}  // namespace

std::string_view model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::kEr: return "ER";
    case ModelKind::kConfiguration: return "Configuration";
    case ModelKind::kBa: return "BA";
    case ModelKind::kWs: return "WS";
    case ModelKind::kHolmeKim: return "HolmeKim";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  const auto k = normalize(s);
  if (k == "er" || k == "erdosrenyi") return ModelKind::kEr;
  if (k == "configuration" || k == "config" || k == "cm") return ModelKind::kConfiguration;
  if (k == "ba" || k == "barabasialbert") return ModelKind::kBa;
  if (k == "ws" || k == "wattsstrogatz") return ModelKind::kWs;
  if (k == "holmekim" || k == "hk") return ModelKind::kHolmeKim;
  throw std::invalid_argument("unknown model kind: " + std::string(s));
}

void ModelSpec::validate() const {
  if (kind == ModelKind::kConfiguration) {
    if (!degree_sequence) throw std::invalid_argument("configuration model requires a degree sequence");
    const auto sum = std::accumulate(degree_sequence->begin(), degree_sequence->end(), std::size_t{0});
    if (sum % 2 != 0) throw std::invalid_argument("degree sequence has odd sum");
    return;
  }
  if (degree_sequence) throw std::invalid_argument("degree sequence is only valid for the configuration model");
  if (n < 1) throw std::invalid_argument("model needs n >= 1");
  if (m > n * (n - 1) / 2) throw std::invalid_argument("m exceeds n(n-1)/2");
  if (ws_rewire_p < 0.0 || ws_rewire_p > 1.0) throw std::invalid_argument("ws_rewire_p outside [0,1]");
  if (hk_triangle_p < 0.0 || hk_triangle_p > 1.0) throw std::invalid_argument("hk_triangle_p outside [0,1]");
}

ModelSpec matched_spec(ModelKind kind, const Graph& real, std::uint64_t seed) {
  ModelSpec spec;
  spec.kind = kind;
  spec.n = real.num_nodes();
  spec.m = real.num_edges();
  spec.seed = seed;
  if (kind == ModelKind::kConfiguration) spec.degree_sequence = real.degree_sequence();
  return spec;
}

std::size_t attachment_count(std::size_t n, std::size_t m_total) {
  if (n == 0) return 1;
  const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(m_total) / static_cast<double>(n)));
  return std::max<std::size_t>(1, k);
}

Graph gen_er(std::size_t n, std::size_t m, std::uint64_t seed) {
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n == 0 ? 0 : n - 1) / 2;
  if (m > pairs) throw std::invalid_argument("gen_er: m exceeds n(n-1)/2");
  Rng rng(seed);
  // Floyd's sampling of pair indices; the smaller of the chosen set and its complement is drawn.
  const bool complement = m > pairs / 2;
  const std::uint64_t draw = complement ? pairs - m : m;
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(draw * 2);
  for (std::uint64_t j = pairs - draw; j < pairs; ++j) {
    const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> picked(chosen.begin(), chosen.end());
  std::sort(picked.begin(), picked.end());

  std::vector<Edge> edges;
  edges.reserve(m);
  std::uint64_t index = 0;
  auto it = picked.begin();
  for (NodeId u = 0; u + 1 < n; ++u)
    for (NodeId v = u + 1; v < n; ++v, ++index) {
      const bool in_sample = it != picked.end() && *it == index;
      if (in_sample) ++it;
      if (in_sample != complement) edges.emplace_back(u, v);
      if (!complement && it == picked.end()) return Graph::from_edges(n, edges);
    }
  return Graph::from_edges(n, edges);
}

bool is_graphical(std::vector<std::size_t> degrees) {
  const auto sum = std::accumulate(degrees.begin(), degrees.end(), std::size_t{0});
  if (sum % 2 != 0) return false;
  std::sort(degrees.rbegin(), degrees.rend());
  const std::size_t n = degrees.size();
  if (n > 0 && degrees.front() >= n) return false;
  std::vector<std::size_t> suffix(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + degrees[i];
  std::size_t lhs = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    lhs += degrees[k - 1];
    // Degrees are descending: entries before `split` are >= k and contribute k.
    const auto split = static_cast<std::size_t>(
        std::partition_point(degrees.begin(), degrees.end(), [k](std::size_t d) { return d >= k; }) -
        degrees.begin());
    const std::size_t capped = split > k ? split - k : 0;
    const std::size_t rhs = k * (k - 1) + capped * k + suffix[std::max(split, k)];
    if (lhs > rhs) return false;
  }
  return true;
}

Graph gen_configuration(const std::vector<std::size_t>& degree_sequence, std::uint64_t seed) {
  const std::size_t n = degree_sequence.size();
  if (!is_graphical(degree_sequence))
    throw std::invalid_argument("gen_configuration: degree sequence is not graphical");
  Rng rng(seed);
  std::vector<NodeId> stubs;
  for (NodeId u = 0; u < n; ++u) stubs.insert(stubs.end(), degree_sequence[u], u);
  shuffle(stubs, rng);
  const std::size_t m = stubs.size() / 2;
  std::vector<Edge> edges(m);
  std::unordered_map<std::uint64_t, int> count;
  count.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    edges[i] = {stubs[2 * i], stubs[2 * i + 1]};
    ++count[edge_key(edges[i].first, edges[i].second)];
  }
  auto is_bad = [&](std::size_t i) {
    const auto [a, b] = edges[i];
    return a == b || count[edge_key(a, b)] > 1;
  };
  std::vector<std::size_t> pending;
  for (std::size_t i = m; i-- > 0;)
    if (is_bad(i)) pending.push_back(i);

  // Double-edge swaps preserve every degree; each accepted swap replaces a bad
  // edge and a random partner with two new simple, unused edges.
  const std::size_t budget = 100 * std::max<std::size_t>(m, 1);
  std::size_t attempts = 0;
  while (!pending.empty() && attempts < budget) {
    const std::size_t i = pending.back();
    if (!is_bad(i)) {
      pending.pop_back();
      continue;
    }
    ++attempts;
    const std::size_t j = uniform_index(rng, m);
    if (j == i) continue;
    auto [a, b] = edges[i];
    auto [c, d] = edges[j];
    if (uniform_real(rng) < 0.5) std::swap(c, d);
    if (a == c || b == d) continue;
    const auto k1 = edge_key(a, c);
    const auto k2 = edge_key(b, d);
    if (k1 == k2 || count[k1] > 0 || count[k2] > 0) continue;
    --count[edge_key(a, b)];
    --count[edge_key(edges[j].first, edges[j].second)];
    ++count[k1];
    ++count[k2];
    edges[i] = {a, c};
    edges[j] = {b, d};
    pending.pop_back();
  }
  if (!pending.empty()) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < m; ++i) bad += is_bad(i) ? 1 : 0;
    throw std::runtime_error("gen_configuration: " + std::to_string(bad) + " self-loops/multi-edges remain after " +
                             std::to_string(attempts) + " swap attempts (n=" + std::to_string(n) +
                             ", m=" + std::to_string(m) + ")");
  }
  return Graph::from_edges(n, edges);
}

Graph gen_ba(std::size_t n, std::size_t m_total, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_ba: n must be at least 2");
  return gen_holme_kim(n, m_total, 0.0, seed);
}

Graph gen_holme_kim(std::size_t n, std::size_t m_total, double triangle_p, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_holme_kim: n must be at least 2");
  if (triangle_p < 0.0 || triangle_p > 1.0) throw std::invalid_argument("gen_holme_kim: triangle_p outside [0,1]");
  const std::size_t k = attachment_count(n, m_total);
  Rng rng(seed);
  GrowingGraph g(n);
  std::vector<NodeId> repeated;
  const std::size_t core = std::min(n, k + 1);
  seed_clique(g, core, repeated);

  std::vector<NodeId> candidates;
  for (NodeId source = static_cast<NodeId>(core); source < n; ++source) {
    auto preferential = [&] {
      NodeId t;
      do {
        t = repeated[uniform_index(rng, repeated.size())];
      } while (g.linked(source, t));
      return t;
    };
    std::vector<NodeId> targets;
    NodeId target = preferential();
    g.link(source, target);
    targets.push_back(target);
    while (targets.size() < k) {
      // Triad formation draws a neighbor of the last preferential target.
      if (triangle_p > 0.0 && uniform_real(rng) < triangle_p) {
        candidates.clear();
        for (NodeId w : g.neighbors(target))
          if (w != source && !g.linked(source, w)) candidates.push_back(w);
        if (!candidates.empty()) {
          const NodeId w = candidates[uniform_index(rng, candidates.size())];
          g.link(source, w);
          targets.push_back(w);
          continue;
        }
      }
      target = preferential();
      g.link(source, target);
      targets.push_back(target);
    }
    for (NodeId t : targets) {
      repeated.push_back(t);
      repeated.push_back(source);
    }
  }
  return g.build();
}

Graph gen_ws(std::size_t n, std::size_t m_total, double rewire_p, std::uint64_t seed) {
  if (n < 3) throw std::invalid_argument("gen_ws: n must be at least 3");
  if (rewire_p < 0.0 || rewire_p > 1.0) throw std::invalid_argument("gen_ws: rewire_p outside [0,1]");
  const auto half = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(m_total) / static_cast<double>(n))));
  const std::size_t k = 2 * half;
  if (k >= n) throw std::invalid_argument("gen_ws: lattice degree " + std::to_string(k) + " must be below n");
  Rng rng(seed);
  std::vector<std::unordered_set<NodeId>> adj(n);
  for (NodeId u = 0; u < n; ++u)
    for (std::size_t j = 1; j <= half; ++j) {
      const auto v = static_cast<NodeId>((u + j) % n);
      adj[u].insert(v);
      adj[v].insert(u);
    }
  for (std::size_t j = 1; j <= half; ++j)
    for (NodeId u = 0; u < n; ++u) {
      const auto v = static_cast<NodeId>((u + j) % n);
      if (uniform_real(rng) >= rewire_p) continue;
      if (adj[u].size() >= n - 1 || !adj[u].contains(v)) continue;
      NodeId w;
      do {
        w = static_cast<NodeId>(uniform_index(rng, n));
      } while (w == u || adj[u].contains(w));
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : adj[u])
      if (u < v) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

Graph generate(const ModelSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::kEr: return gen_er(spec.n, spec.m, spec.seed);
    case ModelKind::kConfiguration: return gen_configuration(*spec.degree_sequence, spec.seed);
    case ModelKind::kBa: return gen_ba(spec.n, spec.m, spec.seed);
    case ModelKind::kWs: return gen_ws(spec.n, spec.m, spec.ws_rewire_p, spec.seed);
    case ModelKind::kHolmeKim: return gen_holme_kim(spec.n, spec.m, spec.hk_triangle_p, spec.seed);
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace nodeclass
