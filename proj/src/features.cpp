#include "nodeclass/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nodeclass/io.hpp"
#include "nodeclass/parallel.hpp"

namespace nodeclass {

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::kDegree: return "degree";
    case Feature::kClustering: return "clustering";
    case Feature::kBetweenness: return "betweenness";
    case Feature::kEigenvector: return "eigenvector";
    case Feature::kCloseness: return "closeness";
    case Feature::kCoreness: return "coreness";
    case Feature::kLinkDiversity: return "link_diversity";
  }
  return "?";
}

std::vector<Feature> feature_set(bool lightweight) {
  std::vector<Feature> cols;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    const auto f = static_cast<Feature>(i);
    if (lightweight && (f == Feature::kBetweenness || f == Feature::kCloseness)) continue;
    cols.push_back(f);
  }
  return cols;
}

double FeatureVector::get(Feature f) const {
  switch (f) {
    case Feature::kDegree: return degree_centrality;
    case Feature::kClustering: return clustering;
    case Feature::kBetweenness: return betweenness;
    case Feature::kEigenvector: return eigenvector;
    case Feature::kCloseness: return closeness;
    case Feature::kCoreness: return static_cast<double>(coreness);
    case Feature::kLinkDiversity: return link_diversity;
  }
  return 0.0;
}

FeatureMatrix::FeatureMatrix(std::vector<FeatureVector> rows, bool lightweight)
    : rows_(std::move(rows)), columns_(feature_set(lightweight)), lightweight_(lightweight) {}

std::vector<std::string> FeatureMatrix::feature_names() const {
  std::vector<std::string> names;
  for (auto f : columns_) names.emplace_back(feature_name(f));
  return names;
}

std::vector<double> FeatureMatrix::values() const {
  std::vector<double> out;
  out.reserve(num_rows() * num_cols());
  for (const auto& r : rows_)
    for (auto f : columns_) out.push_back(r.get(f));
  return out;
}

std::string FeatureMatrix::to_csv() const {
  std::ostringstream out;
  out << "node_id";
  for (auto f : columns_) out << ',' << feature_name(f);
  out << '\n';
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    out << i;
    for (auto f : columns_) out << ',' << format_double(rows_[i].get(f));
    out << '\n';
  }
  return out.str();
}

std::vector<double> degree_centrality(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw std::invalid_argument("degree_centrality: empty graph");
  std::vector<double> out(n);
  for (NodeId u = 0; u < n; ++u) out[u] = static_cast<double>(g.degree(u)) / static_cast<double>(n);
  return out;
}

std::vector<double> local_clustering(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> out(n, 0.0);
  std::vector<std::uint8_t> mark(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    for (NodeId v : nb) mark[v] = 1;
    std::size_t links = 0;
    for (NodeId v : nb)
      for (NodeId w : g.neighbors(v))
        if (w > v && mark[w]) ++links;
    for (NodeId v : nb) mark[v] = 0;
    out[u] = static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
  }
  return out;
}

namespace {

// Fixed source blocks, so partial sums combine in the same order for any worker count.
constexpr std::size_t kSourceBlocks = 64;

struct BrandesWorkspace {
  explicit BrandesWorkspace(std::size_t n) : sigma(n), dist(n), delta(n) { order.reserve(n); }
  std::vector<double> sigma;
  std::vector<std::int64_t> dist;
  std::vector<double> delta;
  std::vector<NodeId> order;
};

void accumulate_from(const Graph& g, NodeId s, BrandesWorkspace& ws, std::vector<double>& acc) {
  std::fill(ws.sigma.begin(), ws.sigma.end(), 0.0);
  std::fill(ws.dist.begin(), ws.dist.end(), -1);
  std::fill(ws.delta.begin(), ws.delta.end(), 0.0);
  ws.order.clear();
  ws.sigma[s] = 1.0;
  ws.dist[s] = 0;
  ws.order.push_back(s);
  for (std::size_t head = 0; head < ws.order.size(); ++head) {
    const NodeId v = ws.order[head];
    for (NodeId w : g.neighbors(v)) {
      if (ws.dist[w] < 0) {
        ws.dist[w] = ws.dist[v] + 1;
        ws.order.push_back(w);
      }
      if (ws.dist[w] == ws.dist[v] + 1) ws.sigma[w] += ws.sigma[v];
    }
  }
  // Predecessors are recovered from distances instead of stored lists.
  for (std::size_t i = ws.order.size(); i-- > 1;) {
    const NodeId w = ws.order[i];
    const double coeff = (1.0 + ws.delta[w]) / ws.sigma[w];
    for (NodeId v : g.neighbors(w))
      if (ws.dist[v] == ws.dist[w] - 1) ws.delta[v] += ws.sigma[v] * coeff;
    acc[w] += ws.delta[w];
  }
}

}  // namespace

std::vector<double> betweenness(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> out(n, 0.0);
  if (n < 3) return out;
  const std::size_t blocks = std::min(n, kSourceBlocks);
  std::vector<std::vector<double>> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * n / blocks;
    const std::size_t end = (b + 1) * n / blocks;
    std::vector<double> acc(n, 0.0);
    BrandesWorkspace ws(n);
    for (std::size_t s = begin; s < end; ++s) accumulate_from(g, static_cast<NodeId>(s), ws, acc);
    partial[b] = std::move(acc);
  });
  for (const auto& p : partial)
    for (std::size_t i = 0; i < n; ++i) out[i] += p[i];
  // Every unordered pair was counted from both ends: halve, then divide by the
  // number of pairs not involving the node.
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (auto& x : out) x *= scale;
  return out;
}

std::vector<double> closeness(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  parallel_for(n, [&](std::size_t u) {
    std::vector<std::size_t> dist(n, std::numeric_limits<std::size_t>::max());
    std::vector<NodeId> queue{static_cast<NodeId>(u)};
    dist[u] = 0;
    std::size_t total = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      total += dist[v];
      for (NodeId w : g.neighbors(v))
        if (dist[w] == std::numeric_limits<std::size_t>::max()) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
    }
    const double reached = static_cast<double>(queue.size() - 1);
    if (total > 0) out[u] = (reached / static_cast<double>(n - 1)) * (reached / static_cast<double>(total));
  });
  return out;
}

EigenvectorResult eigenvector_centrality(const Graph& g, double tol, std::size_t max_iter) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw std::invalid_argument("eigenvector_centrality: empty graph");
  EigenvectorResult res;
  if (g.num_edges() == 0) {
    res.values.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  // Iterating with A + I has the same dominant eigenvector as A but no
  // oscillation on bipartite graphs.
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> next(n);
  for (res.iterations = 1; res.iterations <= max_iter; ++res.iterations) {
    double norm2 = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      double s = x[u];
      for (NodeId v : g.neighbors(u)) s += x[v];
      next[u] = s;
      norm2 += s * s;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    double change = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      next[u] *= inv;
      change += std::abs(next[u] - x[u]);
    }
    x.swap(next);
    // An n * tol bound on the L1 change leaves residuals near 1e-6 on graphs
    // with a few thousand nodes, so the bound is not scaled by n.
    if (change < tol) {
      res.converged = true;
      break;
    }
  }
  res.iterations = std::min(res.iterations, max_iter);
  res.values = std::move(x);
  return res;
}

std::vector<std::uint32_t> coreness(const Graph& g) {
  // Bucket-based peeling in O(n + m).
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> deg(n);
  std::size_t max_deg = 0;
  for (NodeId u = 0; u < n; ++u) {
    deg[u] = static_cast<std::uint32_t>(g.degree(u));
    max_deg = std::max<std::size_t>(max_deg, deg[u]);
  }
  std::vector<std::size_t> bin(max_deg + 1, 0);
  for (auto d : deg) ++bin[d];
  std::size_t start = 0;
  for (auto& b : bin) {
    const std::size_t count = b;
    b = start;
    start += count;
  }
  std::vector<NodeId> vert(n);
  std::vector<std::size_t> pos(n);
  for (NodeId u = 0; u < n; ++u) {
    pos[u] = bin[deg[u]]++;
    vert[pos[u]] = u;
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  if (!bin.empty()) bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = vert[i];
    for (NodeId u : g.neighbors(v)) {
      if (deg[u] <= deg[v]) continue;
      const std::uint32_t du = deg[u];
      const std::size_t pu = pos[u];
      const std::size_t pw = bin[du];
      const NodeId w = vert[pw];
      if (u != w) {
        std::swap(vert[pu], vert[pw]);
        pos[u] = pw;
        pos[w] = pu;
      }
      ++bin[du];
      --deg[u];
    }
  }
  return deg;
}

std::vector<double> link_diversity(const Graph& g, const Partition& partition) {
  const std::size_t n = g.num_nodes();
  if (partition.assignment.size() != n)
    throw std::invalid_argument("link_diversity: partition size does not match graph");
  std::vector<double> out(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    if (nb.empty()) continue;
    std::size_t outside = 0;
    for (NodeId v : nb)
      if (partition.assignment[v] != partition.assignment[u]) ++outside;
    out[u] = static_cast<double>(outside) / static_cast<double>(nb.size());
  }
  return out;
}

FeatureMatrix extract_features(const Graph& g, bool lightweight, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  std::vector<FeatureVector> rows(n);
  if (n == 0) return FeatureMatrix(std::move(rows), lightweight);

  const auto deg = degree_centrality(g);
  const auto clus = local_clustering(g);
  const auto eig = eigenvector_centrality(g).values;
  const auto core = coreness(g);
  const auto partition = detect_communities(g, kDefaultResolution, seed);
  const auto div = link_diversity(g, partition);
  std::vector<double> btw, clo;
  if (!lightweight) {
    btw = betweenness(g);
    clo = closeness(g);
  }
  for (std::size_t u = 0; u < n; ++u) {
    auto& r = rows[u];
    r.degree_centrality = deg[u];
    r.clustering = clus[u];
    r.eigenvector = eig[u];
    r.coreness = core[u];
    r.link_diversity = div[u];
    if (!lightweight) {
      r.betweenness = btw[u];
      r.closeness = clo[u];
    }
  }
  return FeatureMatrix(std::move(rows), lightweight);
}

}  // namespace nodeclass
