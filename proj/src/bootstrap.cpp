#include "nodeclass/bootstrap.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nodeclass/features.hpp"
#include "nodeclass/io.hpp"
#include "nodeclass/models.hpp"

namespace nodeclass {
namespace {

enum Stream : std::uint64_t { kAttachStream = 1, kFeatureStream, kTwinStream, kForestStream, kFeatureTrainStream };

std::size_t resolve_trials(int max_trials, std::size_t k) {
  return max_trials > 0 ? static_cast<std::size_t>(max_trials) : 10 * k;
}

void insert_friend(std::vector<NodeId>& friends, NodeId v) {
  auto it = std::lower_bound(friends.begin(), friends.end(), v);
  if (it == friends.end() || *it != v) friends.insert(it, v);
}

AttachResult finish(GrowingGraph& g, std::vector<NodeId>& friends, std::size_t k, std::size_t trials) {
  AttachResult res{false, 0, k, trials};
  if (friends.empty()) return res;
  res.attached = true;
  res.node = g.add_node(friends);
  return res;
}

}  // namespace

std::string_view attachment_name(Attachment a) {
  return a == Attachment::kVertexCopy ? "vertex-copy" : "triadic-closure";
}

Attachment parse_attachment(std::string_view s) {
  std::string key;
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c))) key.push_back(static_cast<char>(std::tolower(c)));
  if (key == "vertexcopy" || key == "vc") return Attachment::kVertexCopy;
  if (key == "triadicclosure" || key == "tc") return Attachment::kTriadicClosure;
  throw std::invalid_argument("unknown attachment: " + std::string(s));
}

GrowingGraph::GrowingGraph(const Graph& g) : adj_(g.num_nodes()), edges_(g.num_edges()) {
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto nb = g.neighbors(u);
    adj_[u].assign(nb.begin(), nb.end());
  }
}

NodeId GrowingGraph::add_node(std::span<const NodeId> friends) {
  const auto u = static_cast<NodeId>(adj_.size());
  std::vector<NodeId> mine(friends.begin(), friends.end());
  std::sort(mine.begin(), mine.end());
  if (std::adjacent_find(mine.begin(), mine.end()) != mine.end())
    throw std::invalid_argument("GrowingGraph::add_node: repeated friend");
  if (!mine.empty() && mine.back() >= u) throw std::out_of_range("GrowingGraph::add_node: unknown friend");
  // u is the largest id, so appending keeps every list sorted.
  for (NodeId v : mine) adj_[v].push_back(u);
  edges_ += mine.size();
  adj_.push_back(std::move(mine));
  return u;
}

void GrowingGraph::remove_nodes(const std::vector<bool>& drop) {
  if (drop.size() != adj_.size()) throw std::invalid_argument("GrowingGraph::remove_nodes: size mismatch");
  constexpr NodeId kGone = static_cast<NodeId>(-1);
  std::vector<NodeId> remap(adj_.size(), kGone);
  NodeId next = 0;
  for (std::size_t u = 0; u < adj_.size(); ++u)
    if (!drop[u]) remap[u] = next++;
  std::vector<std::vector<NodeId>> out(next);
  std::size_t degree_sum = 0;
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    if (drop[u]) continue;
    auto& list = out[remap[u]];
    for (NodeId v : adj_[u])
      if (remap[v] != kGone) list.push_back(remap[v]);
    degree_sum += list.size();
  }
  adj_ = std::move(out);
  edges_ = degree_sum / 2;
}

Graph GrowingGraph::to_graph() const {
  std::vector<Edge> edges;
  edges.reserve(edges_);
  for (NodeId u = 0; u < adj_.size(); ++u)
    for (NodeId v : adj_[u])
      if (u < v) edges.emplace_back(u, v);
  return Graph::from_edges(adj_.size(), edges);
}

AttachResult vertex_copy_attach(GrowingGraph& g, double beta, int max_trials, Rng& rng) {
  const std::size_t n = g.num_nodes();
  if (n < 2) throw std::invalid_argument("vertex_copy_attach: need at least 2 nodes");
  std::vector<NodeId> templates;
  for (NodeId v = 0; v < n; ++v)
    if (g.degree(v) > 0) templates.push_back(v);
  if (templates.empty()) return {};
  // Uniform over nodes of positive degree, the same law as resampling isolated picks.
  const NodeId v = templates[uniform_index(rng, templates.size())];
  const auto nb = g.neighbors(v);
  const std::size_t k = nb.size();
  const std::size_t limit = resolve_trials(max_trials, k);
  std::vector<NodeId> friends;
  std::size_t trials = 0;
  while (friends.size() < k && trials < limit) {
    ++trials;
    const NodeId w = uniform_real(rng) < beta ? nb[uniform_index(rng, k)] : static_cast<NodeId>(uniform_index(rng, n));
    insert_friend(friends, w);
  }
  return finish(g, friends, k, trials);
}

AttachResult triadic_closure_attach(GrowingGraph& g, double beta, std::span<const std::size_t> degrees,
                                    std::size_t target_n, int max_trials, Rng& rng) {
  const std::size_t n = g.num_nodes();
  if (n < 2) throw std::invalid_argument("triadic_closure_attach: need at least 2 nodes");
  if (degrees.empty()) throw std::invalid_argument("triadic_closure_attach: empty degree sequence");
  if (target_n == 0) throw std::invalid_argument("triadic_closure_attach: target_n must be positive");
  const double sampled = static_cast<double>(degrees[uniform_index(rng, degrees.size())]);
  const double scaled = std::round(sampled * static_cast<double>(n) / static_cast<double>(target_n));
  const auto k = static_cast<std::size_t>(std::clamp(scaled, 1.0, static_cast<double>(n - 1)));
  const std::size_t limit = resolve_trials(max_trials, k);
  std::vector<NodeId> friends;
  std::size_t trials = 0;
  while (friends.size() < k && trials < limit) {
    ++trials;
    if (!friends.empty() && uniform_real(rng) < beta) {
      const NodeId v = friends[uniform_index(rng, friends.size())];
      const auto nb = g.neighbors(v);
      if (nb.empty()) continue;
      insert_friend(friends, nb[uniform_index(rng, nb.size())]);
    } else {
      insert_friend(friends, static_cast<NodeId>(uniform_index(rng, n)));
    }
  }
  return finish(g, friends, k, trials);
}

void GrowthConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in [0,1]");
  if (!(growth_rate > 0.0)) throw std::invalid_argument("growth_rate must be > 0");
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0))
    throw std::invalid_argument("score_threshold must be in [0,1]");
  if (stall_iterations == 0) throw std::invalid_argument("stall_iterations must be >= 1");
}

std::string_view growth_status_name(GrowthStatus s) {
  switch (s) {
    case GrowthStatus::kReachedTarget: return "reached_target";
    case GrowthStatus::kMaxIterations: return "max_iterations";
    case GrowthStatus::kStalled: return "stalled";
  }
  return "?";
}

std::string GrowthTrace::to_csv() const {
  std::ostringstream out;
  out << "iteration,n_before,added,pruned,n_after,mean_score\n";
  for (const auto& r : records)
    out << r.iteration << ',' << r.n_before << ',' << r.added << ',' << r.pruned << ',' << r.n_after << ','
        << format_double(r.mean_score) << '\n';
  return out.str();
}

GrowthResult grow_network(const Graph& seed_graph, const Graph& original, const ForestModel& classifier,
                          const GrowthConfig& cfg, const GrowthObserver& observer) {
  cfg.validate();
  if (seed_graph.num_nodes() == 0) throw std::invalid_argument("grow_network: empty seed graph");
  if (classifier.num_classes < 2) throw std::invalid_argument("grow_network: classifier needs two classes");
  if (classifier.num_features() != feature_set(cfg.rescore_lightweight).size())
    throw std::invalid_argument("grow_network: classifier feature count does not match rescore_lightweight");

  const auto degrees = original.degree_sequence();
  GrowthResult result;
  auto& trace = result.trace;
  trace.target_n = cfg.target_n > 0 ? cfg.target_n : original.num_nodes();
  const auto k = static_cast<std::size_t>(classifier.num_classes);

  GrowingGraph g(seed_graph);
  Rng rng(derive_seed(cfg.seed, {kAttachStream}));
  std::size_t unchanged = 0;
  trace.status = GrowthStatus::kMaxIterations;
  if (g.num_nodes() >= trace.target_n) trace.status = GrowthStatus::kReachedTarget;

  for (std::size_t it = 0; it < cfg.max_iterations && g.num_nodes() < trace.target_n; ++it) {
    GrowthRecord rec;
    rec.iteration = it;
    rec.n_before = g.num_nodes();
    if (rec.n_before < 2) {
      // Nothing left to attach to.
      trace.status = GrowthStatus::kStalled;
      break;
    }
    const auto to_add = static_cast<std::size_t>(std::ceil(static_cast<double>(rec.n_before) * cfg.growth_rate));
    for (std::size_t a = 0; a < to_add; ++a) {
      const auto res = cfg.attachment == Attachment::kVertexCopy
                           ? vertex_copy_attach(g, cfg.beta, cfg.max_trials, rng)
                           : triadic_closure_attach(g, cfg.beta, degrees, trace.target_n, cfg.max_trials, rng);
      if (res.attached)
        ++rec.added;
      else
        ++rec.failed_attachments;
    }

    const Graph current = g.to_graph();
    const auto fm = extract_features(current, cfg.rescore_lightweight, derive_seed(cfg.seed, {kFeatureStream, it}));
    const auto proba = predict_proba(classifier, fm.values());
    const std::size_t n = current.num_nodes();
    std::vector<bool> drop(n, false);
    double sum = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      const double real = proba[u * k];
      sum += real;
      if (real < cfg.score_threshold) {
        drop[u] = true;
        ++rec.pruned;
      } else {
        rec.min_surviving_score = std::min(rec.min_surviving_score, real);
      }
    }
    rec.mean_score = n > 0 ? sum / static_cast<double>(n) : 0.0;
    g.remove_nodes(drop);
    rec.n_after = g.num_nodes();
    if (rec.min_surviving_score < cfg.score_threshold)
      throw std::logic_error("grow_network: a surviving node scored below the threshold");
    if (rec.n_after != rec.n_before + rec.added - rec.pruned)
      throw std::logic_error("grow_network: trace bookkeeping mismatch");
    trace.records.push_back(rec);
    if (observer) observer(rec, g.to_graph());

    if (rec.n_after >= trace.target_n) {
      trace.status = GrowthStatus::kReachedTarget;
      break;
    }
    if (rec.n_after == 0) {
      trace.status = GrowthStatus::kStalled;
      break;
    }
    unchanged = rec.n_after == rec.n_before ? unchanged + 1 : 0;
    if (unchanged >= cfg.stall_iterations) {
      trace.status = GrowthStatus::kStalled;
      break;
    }
  }
  result.graph = g.to_graph();
  return result;
}

ForestModel train_growth_classifier(const Graph& original, bool lightweight, TrainConfig cfg, std::uint64_t seed) {
  if (original.num_nodes() == 0) throw std::invalid_argument("train_growth_classifier: empty original");
  const Graph twin = gen_configuration(original.degree_sequence(), derive_seed(seed, {kTwinStream}));
  const auto feature_seed = derive_seed(seed, {kFeatureTrainStream});
  const auto real = extract_features(original, lightweight, feature_seed);
  const auto fake = extract_features(twin, lightweight, feature_seed);
  LabeledNodeDataset data;
  data.feature_names = real.feature_names();
  const auto rv = real.values();
  const auto fv = fake.values();
  data.features.insert(data.features.end(), rv.begin(), rv.end());
  data.features.insert(data.features.end(), fv.begin(), fv.end());
  data.labels.assign(real.num_rows(), 0);
  data.labels.insert(data.labels.end(), fake.num_rows(), 1);
  data.network_ids.assign(real.num_rows(), 0);
  data.network_ids.insert(data.network_ids.end(), fake.num_rows(), 1);
  cfg.seed = derive_seed(seed, {kForestStream});
  return train_forest(data, cfg);
}

Graph select_seed_ego(const Graph& original, std::size_t min_nodes, std::uint64_t seed) {
  if (original.num_nodes() == 0) throw std::invalid_argument("select_seed_ego: empty graph");
  std::vector<NodeId> candidates;
  NodeId best = 0;
  for (NodeId u = 0; u < original.num_nodes(); ++u) {
    if (original.degree(u) >= min_nodes) candidates.push_back(u);
    if (original.degree(u) > original.degree(best)) best = u;
  }
  if (candidates.empty()) return ego_network(original, best);
  Rng rng(seed);
  return ego_network(original, candidates[uniform_index(rng, candidates.size())]);
}

}  // namespace nodeclass
