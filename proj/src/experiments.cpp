#include "nodeclass/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nodeclass/io.hpp"
#include "nodeclass/parallel.hpp"
#include "nodeclass/random.hpp"

namespace nodeclass {
namespace {

using json = nlohmann::json;

// Stream ids under the master seed.
enum Stream : std::uint64_t { kFeatureStream = 1, kFoldStream, kForestStream, kModelStream, kSampleStream };

std::uint64_t feature_seed(const ExperimentConfig& cfg) { return derive_seed(cfg.seed, {kFeatureStream}); }

std::uint64_t forest_seed(const ExperimentConfig& cfg, std::size_t repeat, std::size_t fold) {
  return derive_seed(cfg.seed, {kForestStream, repeat, fold});
}

void append_rows(LabeledNodeDataset& data, const FeatureMatrix& fm, int label, int network_id) {
  const auto vals = fm.values();
  data.features.insert(data.features.end(), vals.begin(), vals.end());
  data.labels.insert(data.labels.end(), fm.num_rows(), label);
  data.network_ids.insert(data.network_ids.end(), fm.num_rows(), network_id);
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

struct FoldEval {
  // One accuracy per evaluated variant (a single one except for multi-fraction runs).
  std::vector<double> accuracies;
  std::size_t test_units = 0;
  std::size_t train_rows = 0;
  std::vector<double> importances;
  std::vector<NodeScore> scores;
  std::vector<std::string> flags;
};

struct NetworkData {
  const FeatureMatrix* features;
  int label;
  int network_id;
};

struct FoldJob {
  std::size_t repeat;
  std::size_t fold;
  const std::vector<NetworkData>* networks;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

using NetworkEvaluator = std::function<void(const FoldJob&, const ForestModel&, FoldEval&)>;

std::vector<FoldJob> plan_network_folds(const std::vector<NetworkData>& networks, std::size_t repeat,
                                        const ExperimentConfig& cfg) {
  std::vector<int> labels;
  for (const auto& n : networks) labels.push_back(n.label);
  const auto fold_of = stratified_folds(labels, cfg.folds, derive_seed(cfg.seed, {kFoldStream, repeat}));
  std::vector<FoldJob> jobs;
  for (std::size_t f = 0; f < cfg.folds; ++f) {
    FoldJob job{repeat, f, &networks, {}, {}};
    for (std::size_t i = 0; i < networks.size(); ++i) (fold_of[i] == f ? job.test : job.train).push_back(i);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

std::vector<FoldEval> run_network_folds(const std::vector<FoldJob>& jobs, const ExperimentConfig& cfg,
                                        const NetworkEvaluator& evaluate) {
  std::vector<FoldEval> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto& job = jobs[j];
    LabeledNodeDataset train;
    train.feature_names = (*job.networks)[job.train.front()].features->feature_names();
    for (auto i : job.train) {
      const auto& net = (*job.networks)[i];
      append_rows(train, *net.features, net.label, net.network_id);
    }
    TrainConfig tc = cfg.forest;
    tc.seed = forest_seed(cfg, job.repeat, job.fold);
    const auto model = train_forest(train, tc);
    auto& eval = out[j];
    eval.train_rows = train.num_rows();
    eval.importances = model.importances;
    evaluate(job, model, eval);
  });
  return out;
}

// Pooled node accuracy over the test networks of a fold.
void evaluate_test_nodes(const FoldJob& job, const ForestModel& model, FoldEval& eval) {
  std::size_t correct = 0, total = 0;
  const auto k = static_cast<std::size_t>(model.num_classes);
  for (auto i : job.test) {
    const auto& net = (*job.networks)[i];
    if (net.features->num_rows() == 0) continue;
    const auto vals = net.features->values();
    const auto proba = predict_proba(model, vals);
    for (std::size_t r = 0; r < net.features->num_rows(); ++r) {
      const auto row = std::span(proba).subspan(r * k, k);
      const int pred = argmax_class(row);
      correct += pred == net.label ? 1 : 0;
      ++total;
      eval.scores.push_back(
          {job.repeat, job.fold, net.network_id, net.label, static_cast<NodeId>(r), pred, {row.begin(), row.end()}});
    }
  }
  eval.test_units = total;
  if (total == 0) eval.flags.push_back("fold " + std::to_string(job.fold) + " of repeat " +
                                       std::to_string(job.repeat) + " has no test nodes");
  eval.accuracies = {total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total)};
}

CvReport summarize(const std::vector<FoldJob>& jobs, std::vector<FoldEval>& evals, const ExperimentConfig& cfg,
                   std::vector<std::string> feature_names, std::size_t variant = 0) {
  CvReport rep;
  rep.config = cfg;
  rep.feature_names = std::move(feature_names);
  std::vector<double> acc;
  const std::size_t d = rep.feature_names.size();
  std::vector<std::vector<double>> imp(d);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto& e = evals[j];
    const double a = e.accuracies.at(variant);
    acc.push_back(a);
    rep.per_fold.push_back({jobs[j].repeat, jobs[j].fold, a, e.test_units, e.train_rows,
                            forest_seed(cfg, jobs[j].repeat, jobs[j].fold)});
    for (std::size_t f = 0; f < d; ++f) imp[f].push_back(100.0 * e.importances[f]);
    rep.flags.insert(rep.flags.end(), e.flags.begin(), e.flags.end());
  }
  std::tie(rep.accuracy_mean, rep.accuracy_std) = mean_std(acc);
  for (std::size_t f = 0; f < d; ++f) {
    const auto [m, s] = mean_std(imp[f]);
    rep.importance_mean.push_back(m);
    rep.importance_std.push_back(s);
  }
  return rep;
}

void require_folds(std::span<const int> labels, int num_classes, std::size_t folds, const char* what) {
  std::vector<std::size_t> per_class(static_cast<std::size_t>(num_classes), 0);
  for (int l : labels) ++per_class[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < per_class.size(); ++c)
    if (per_class[c] < folds)
      throw std::invalid_argument(std::string(what) + ": class " + std::to_string(c) + " has " +
                                  std::to_string(per_class[c]) + " units, fewer than " + std::to_string(folds) +
                                  " folds");
}

std::vector<std::size_t> rows_per_class(const std::vector<NetworkData>& nets, int num_classes) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(num_classes), 0);
  for (const auto& n : nets) rows[static_cast<std::size_t>(n.label)] += n.features->num_rows();
  return rows;
}

std::vector<std::string> default_class_names(int k) {
  std::vector<std::string> names;
  for (int c = 0; c < k; ++c) names.push_back(std::to_string(c));
  return names;
}

json spec_json(const ModelSpec& s) {
  json j{{"kind", model_kind_name(s.kind)},
         {"n", s.n},
         {"m", s.m},
         {"ws_rewire_p", s.ws_rewire_p},
         {"hk_triangle_p", s.hk_triangle_p},
         {"seed", s.seed}};
  j["degree_sequence"] = s.degree_sequence ? json(*s.degree_sequence) : json(nullptr);
  return j;
}

ModelSpec spec_from(const json& j) {
  ModelSpec s;
  s.kind = parse_model_kind(j.at("kind").get<std::string>());
  s.n = j.value("n", std::size_t{0});
  s.m = j.value("m", std::size_t{0});
  if (j.contains("degree_sequence") && !j.at("degree_sequence").is_null())
    s.degree_sequence = j.at("degree_sequence").get<std::vector<std::size_t>>();
  s.ws_rewire_p = j.value("ws_rewire_p", 0.1);
  s.hk_triangle_p = j.value("hk_triangle_p", 1.0);
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

json config_json(const ExperimentConfig& c) {
  json forest{{"num_trees", c.forest.num_trees},
              {"max_features", c.forest.max_features},
              {"min_leaf", c.forest.min_leaf},
              {"max_depth", c.forest.max_depth ? json(*c.forest.max_depth) : json(nullptr)}};
  return json{{"mode", experiment_mode_name(c.mode)},
              {"folds", c.folds},
              {"repeats", c.repeats},
              {"lightweight", c.lightweight},
              {"sample_fraction", c.sample_fraction},
              {"score_threshold", c.score_threshold},
              {"model_spec", c.model_spec ? spec_json(*c.model_spec) : json(nullptr)},
              {"seed", c.seed},
              {"forest", forest}};
}

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

std::string_view experiment_mode_name(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::kNodeCv: return "node_cv";
    case ExperimentMode::kNetworkCv: return "network_cv";
    case ExperimentMode::kRealVsModel: return "real_vs_model";
    case ExperimentMode::kWholeNetwork: return "whole_network";
  }
  return "?";
}

ExperimentMode parse_experiment_mode(std::string_view s) {
  const auto k = lower(s);
  if (k == "node_cv") return ExperimentMode::kNodeCv;
  if (k == "network_cv") return ExperimentMode::kNetworkCv;
  if (k == "real_vs_model") return ExperimentMode::kRealVsModel;
  if (k == "whole_network") return ExperimentMode::kWholeNetwork;
  throw std::invalid_argument("unknown experiment mode: " + std::string(s));
}

void ExperimentConfig::validate() const {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) throw std::invalid_argument("sample_fraction must be in (0,1]");
  if (score_threshold < 0.0 || score_threshold > 1.0) throw std::invalid_argument("score_threshold must be in [0,1]");
  if (forest.num_trees < 1) throw std::invalid_argument("forest.num_trees must be >= 1");
}

std::vector<FeatureMatrix> compute_features(std::span<const Graph> graphs, bool lightweight, std::uint64_t seed) {
  std::vector<FeatureMatrix> out(graphs.size());
  parallel_for(graphs.size(), [&](std::size_t i) { out[i] = extract_features(graphs[i], lightweight, seed); });
  return out;
}

LabeledNodeDataset build_node_dataset(std::span<const NodeSource> sources, bool lightweight, std::uint64_t seed,
                                      std::vector<std::string>* flags) {
  std::vector<FeatureMatrix> fms(sources.size());
  parallel_for(sources.size(), [&](std::size_t i) { fms[i] = extract_features(sources[i].graph, lightweight, seed); });
  LabeledNodeDataset data;
  data.feature_names = FeatureMatrix({}, lightweight).feature_names();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (fms[i].num_rows() == 0 && flags)
      flags->push_back("network " + std::to_string(sources[i].network_id) + " is empty and contributes no rows");
    append_rows(data, fms[i], sources[i].label, sources[i].network_id);
  }
  return data;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 1) throw std::invalid_argument("stratified_folds: folds must be >= 1");
  int num_classes = 0;
  for (int l : labels) num_classes = std::max(num_classes, l + 1);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
  std::size_t largest = 0;
  for (const auto& m : members) largest = std::max(largest, m.size());

  Rng rng(seed);
  std::vector<std::size_t> key(largest);
  std::iota(key.begin(), key.end(), std::size_t{0});
  shuffle(key, rng);

  std::vector<std::size_t> fold_of(labels.size(), 0);
  std::vector<std::size_t> rank;
  for (const auto& m : members) {
    rank.resize(m.size());
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    for (std::size_t pos = 0; pos < rank.size(); ++pos) fold_of[m[rank[pos]]] = pos % folds;
  }
  return fold_of;
}

std::vector<Graph> sample_ego_networks(const Graph& g, std::size_t count, std::size_t min_nodes, std::uint64_t seed) {
  std::vector<NodeId> eligible;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (g.degree(u) >= min_nodes) eligible.push_back(u);
  Rng rng(seed);
  shuffle(eligible, rng);
  eligible.resize(std::min(count, eligible.size()));
  std::vector<Graph> out(eligible.size());
  parallel_for(eligible.size(), [&](std::size_t i) { out[i] = ego_network(g, eligible[i]); });
  return out;
}

CvReport kfold_node_cv(std::span<const Graph> graphs, const ExperimentConfig& cfg) {
  cfg.validate();
  if (graphs.size() < 2) throw std::invalid_argument("kfold_node_cv: need at least two graphs");
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (graphs[i].num_nodes() < cfg.folds)
      throw std::invalid_argument("kfold_node_cv: graph " + std::to_string(i) + " has fewer nodes than folds");

  const auto fms = compute_features(graphs, cfg.lightweight, feature_seed(cfg));
  LabeledNodeDataset data;
  data.feature_names = fms.front().feature_names();
  for (std::size_t i = 0; i < fms.size(); ++i) append_rows(data, fms[i], static_cast<int>(i), static_cast<int>(i));
  const std::size_t d = data.num_features();
  const auto k = static_cast<std::size_t>(graphs.size());

  std::vector<std::vector<std::size_t>> fold_of(cfg.repeats);
  for (std::size_t r = 0; r < cfg.repeats; ++r)
    fold_of[r] = stratified_folds(data.labels, cfg.folds, derive_seed(cfg.seed, {kFoldStream, r}));

  std::vector<FoldJob> jobs;
  for (std::size_t r = 0; r < cfg.repeats; ++r)
    for (std::size_t f = 0; f < cfg.folds; ++f) jobs.push_back({r, f, nullptr, {}, {}});
  std::vector<FoldEval> evals(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [r, f] = std::pair(jobs[j].repeat, jobs[j].fold);
    LabeledNodeDataset train;
    train.feature_names = data.feature_names;
    std::vector<std::size_t> test;
    for (std::size_t row = 0; row < data.num_rows(); ++row) {
      if (fold_of[r][row] == f) {
        test.push_back(row);
        continue;
      }
      const auto x = data.row(row);
      train.features.insert(train.features.end(), x.begin(), x.end());
      train.labels.push_back(data.labels[row]);
      train.network_ids.push_back(data.network_ids[row]);
    }
    TrainConfig tc = cfg.forest;
    tc.seed = forest_seed(cfg, r, f);
    const auto model = train_forest(train, tc);
    std::vector<double> xs;
    xs.reserve(test.size() * d);
    for (auto row : test) {
      const auto x = data.row(row);
      xs.insert(xs.end(), x.begin(), x.end());
    }
    const auto proba = predict_proba(model, xs);
    auto& e = evals[j];
    std::size_t correct = 0;
    // Node ids are row offsets within the owning graph.
    std::vector<std::size_t> offset(k + 1, 0);
    for (std::size_t i = 0; i < k; ++i) offset[i + 1] = offset[i] + graphs[i].num_nodes();
    for (std::size_t t = 0; t < test.size(); ++t) {
      const auto row = std::span(proba).subspan(t * k, k);
      const int pred = argmax_class(row);
      const int label = data.labels[test[t]];
      correct += pred == label ? 1 : 0;
      e.scores.push_back({r, f, label, label, static_cast<NodeId>(test[t] - offset[static_cast<std::size_t>(label)]),
                          pred, {row.begin(), row.end()}});
    }
    e.test_units = test.size();
    e.train_rows = train.num_rows();
    e.importances = model.importances;
    e.accuracies = {100.0 * static_cast<double>(correct) / static_cast<double>(test.size())};
  });

  auto rep = summarize(jobs, evals, cfg, data.feature_names);
  rep.class_rows = data.class_counts();
  rep.class_names = default_class_names(static_cast<int>(k));
  for (auto& e : evals)
    for (auto& s : e.scores) rep.node_scores.push_back(std::move(s));
  return rep;
}

CvReport kfold_network_cv(const GraphCollection& collection, const ExperimentConfig& cfg) {
  cfg.validate();
  if (collection.num_classes() < 2) throw std::invalid_argument("kfold_network_cv: need at least two classes");
  require_folds(collection.labels, collection.num_classes(), cfg.folds, "kfold_network_cv");
  const auto fms = compute_features(collection.graphs, cfg.lightweight, feature_seed(cfg));
  std::vector<NetworkData> nets;
  for (std::size_t i = 0; i < collection.size(); ++i) nets.push_back({&fms[i], collection.labels[i], static_cast<int>(i)});

  std::vector<FoldJob> jobs;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    auto rj = plan_network_folds(nets, r, cfg);
    std::move(rj.begin(), rj.end(), std::back_inserter(jobs));
  }
  auto evals = run_network_folds(jobs, cfg, evaluate_test_nodes);
  auto rep = summarize(jobs, evals, cfg, fms.front().feature_names());
  rep.class_rows = rows_per_class(nets, collection.num_classes());
  rep.class_names = collection.class_names;
  for (std::size_t i = 0; i < collection.size(); ++i)
    if (fms[i].num_rows() == 0) rep.flags.push_back("network " + std::to_string(i) + " is empty");
  for (auto& e : evals)
    for (auto& s : e.scores) rep.node_scores.push_back(std::move(s));
  return rep;
}

CvReport real_vs_model_experiment(std::span<const Graph> reals, ModelKind kind, const ExperimentConfig& cfg) {
  cfg.validate();
  if (reals.empty()) throw std::invalid_argument("real_vs_model_experiment: need at least one real graph");
  const auto real_fms = compute_features(reals, cfg.lightweight, feature_seed(cfg));
  const std::size_t count = reals.size();

  std::vector<std::string> flags;
  std::vector<GeneratedModel> generated;
  // Per repeat: generated graphs, their features and the network list.
  std::vector<std::vector<FeatureMatrix>> model_fms(cfg.repeats);
  std::vector<std::vector<NetworkData>> nets(cfg.repeats);
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    std::vector<std::optional<Graph>> models(count);
    std::vector<std::string> errors(count);
    parallel_for(count, [&](std::size_t i) {
      auto spec = matched_spec(kind, reals[i], derive_seed(cfg.seed, {kModelStream, r, i}));
      if (cfg.model_spec) {
        spec.ws_rewire_p = cfg.model_spec->ws_rewire_p;
        spec.hk_triangle_p = cfg.model_spec->hk_triangle_p;
      }
      try {
        models[i] = generate(spec);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    });
    std::vector<Graph> ok;
    std::vector<int> ok_ids;
    for (std::size_t i = 0; i < count; ++i) {
      if (!models[i]) {
        flags.push_back("repeat " + std::to_string(r) + ": model for network " + std::to_string(i) +
                        " skipped: " + errors[i]);
        continue;
      }
      generated.push_back({r, static_cast<int>(count + i), models[i]->num_nodes(), models[i]->num_edges(),
                           reals[i].num_edges()});
      ok.push_back(std::move(*models[i]));
      ok_ids.push_back(static_cast<int>(count + i));
    }
    model_fms[r] = compute_features(ok, cfg.lightweight, feature_seed(cfg));
    for (std::size_t i = 0; i < count; ++i) nets[r].push_back({&real_fms[i], 0, static_cast<int>(i)});
    for (std::size_t i = 0; i < ok.size(); ++i) nets[r].push_back({&model_fms[r][i], 1, ok_ids[i]});
  }

  std::vector<FoldJob> jobs;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    std::vector<int> labels;
    for (const auto& n : nets[r]) labels.push_back(n.label);
    require_folds(labels, 2, cfg.folds, "real_vs_model_experiment");
    auto rj = plan_network_folds(nets[r], r, cfg);
    std::move(rj.begin(), rj.end(), std::back_inserter(jobs));
  }
  auto evals = run_network_folds(jobs, cfg, evaluate_test_nodes);
  auto rep = summarize(jobs, evals, cfg, real_fms.front().feature_names());
  rep.class_rows = rows_per_class(nets.front(), 2);
  rep.class_names = {"real", std::string(model_kind_name(kind))};
  rep.flags.insert(rep.flags.begin(), flags.begin(), flags.end());
  rep.generated = std::move(generated);
  for (auto& e : evals)
    for (auto& s : e.scores) rep.node_scores.push_back(std::move(s));
  return rep;
}

std::vector<CvReport> whole_network_classify(const GraphCollection& collection, const ExperimentConfig& cfg,
                                             std::span<const double> fractions) {
  cfg.validate();
  for (double p : fractions)
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("whole_network_classify: fraction outside (0,1]");
  if (collection.num_classes() < 2) throw std::invalid_argument("whole_network_classify: need at least two classes");
  require_folds(collection.labels, collection.num_classes(), cfg.folds, "whole_network_classify");
  const auto fms = compute_features(collection.graphs, cfg.lightweight, feature_seed(cfg));
  std::vector<NetworkData> nets;
  for (std::size_t i = 0; i < collection.size(); ++i) nets.push_back({&fms[i], collection.labels[i], static_cast<int>(i)});

  std::vector<FoldJob> jobs;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    auto rj = plan_network_folds(nets, r, cfg);
    std::move(rj.begin(), rj.end(), std::back_inserter(jobs));
  }
  const auto k = static_cast<std::size_t>(collection.num_classes());
  auto evaluate = [&](const FoldJob& job, const ForestModel& model, FoldEval& eval) {
    std::vector<std::size_t> correct(fractions.size(), 0);
    for (auto i : job.test) {
      const auto& net = nets[i];
      const std::size_t n = net.features->num_rows();
      if (n == 0) {
        eval.flags.push_back("network " + std::to_string(i) + " is empty and counted as misclassified");
        continue;
      }
      const auto proba = predict_proba(model, net.features->values());
      // One shuffle per network; each fraction takes a prefix, so samples are nested.
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng rng(derive_seed(cfg.seed, {kSampleStream, job.repeat, i}));
      shuffle(order, rng);
      for (std::size_t pi = 0; pi < fractions.size(); ++pi) {
        const auto take = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(fractions[pi] * static_cast<double>(n) - 1e-9)), 1, n);
        std::vector<double> avg(k, 0.0);
        for (std::size_t s = 0; s < take; ++s)
          for (std::size_t c = 0; c < k; ++c) avg[c] += proba[order[s] * k + c];
        correct[pi] += argmax_class(avg) == net.label ? 1 : 0;
      }
    }
    eval.test_units = job.test.size();
    for (auto c : correct)
      eval.accuracies.push_back(100.0 * static_cast<double>(c) / static_cast<double>(job.test.size()));
  };
  auto evals = run_network_folds(jobs, cfg, evaluate);
  std::vector<CvReport> reports;
  for (std::size_t pi = 0; pi < fractions.size(); ++pi) {
    auto rep = summarize(jobs, evals, cfg, fms.front().feature_names(), pi);
    rep.config.mode = ExperimentMode::kWholeNetwork;
    rep.config.sample_fraction = fractions[pi];
    rep.class_rows = rows_per_class(nets, collection.num_classes());
    rep.class_names = collection.class_names;
    reports.push_back(std::move(rep));
  }
  return reports;
}

CvReport whole_network_classify(const GraphCollection& collection, const ExperimentConfig& cfg) {
  const double p = cfg.sample_fraction;
  return std::move(whole_network_classify(collection, cfg, std::span(&p, 1)).front());
}

std::vector<std::string> network_feature_names() {
  return {"avg_degree", "triangles", "avg_clustering", "assortativity", "density", "transitivity"};
}

std::optional<double> degree_assortativity(const Graph& g) {
  // Pearson correlation of the degrees at either end of every edge, both orientations.
  double s1 = 0.0, s2 = 0.0, sxy = 0.0, count = 0.0;
  for (auto [u, v] : g.edges()) {
    const double du = static_cast<double>(g.degree(u));
    const double dv = static_cast<double>(g.degree(v));
    s1 += du + dv;
    s2 += du * du + dv * dv;
    sxy += 2.0 * du * dv;
    count += 2.0;
  }
  if (count == 0.0) return std::nullopt;
  const double mean = s1 / count;
  const double var = s2 / count - mean * mean;
  if (var <= 1e-12 * std::max(1.0, mean * mean)) return std::nullopt;
  return (sxy / count - mean * mean) / var;
}

NetworkSummary network_features(const Graph& g) {
  NetworkSummary s;
  s.values.assign(6, 0.0);
  const std::size_t n = g.num_nodes();
  const auto assort = degree_assortativity(g);
  s.assortativity_undefined = !assort;
  if (n == 0) return s;
  const auto stats = graph_stats(g);
  const auto clus = local_clustering(g);
  s.values[0] = stats.avg_degree;
  s.values[1] = static_cast<double>(count_triangles(g));
  s.values[2] = std::accumulate(clus.begin(), clus.end(), 0.0) / static_cast<double>(n);
  s.values[3] = assort.value_or(0.0);
  s.values[4] = stats.density;
  s.values[5] = stats.transitivity;
  return s;
}

CvReport feature_based_baseline(const GraphCollection& collection, const ExperimentConfig& cfg) {
  cfg.validate();
  if (collection.num_classes() < 2) throw std::invalid_argument("feature_based_baseline: need at least two classes");
  require_folds(collection.labels, collection.num_classes(), cfg.folds, "feature_based_baseline");
  const std::size_t count = collection.size();
  std::vector<NetworkSummary> summaries(count);
  parallel_for(count, [&](std::size_t i) { summaries[i] = network_features(collection.graphs[i]); });
  std::vector<std::string> flags;
  for (std::size_t i = 0; i < count; ++i)
    if (summaries[i].assortativity_undefined)
      flags.push_back("network " + std::to_string(i) + ": assortativity undefined, set to 0");

  const auto names = network_feature_names();
  const std::size_t d = names.size();
  std::vector<FoldJob> jobs;
  std::vector<std::vector<std::size_t>> fold_of(cfg.repeats);
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    fold_of[r] = stratified_folds(collection.labels, cfg.folds, derive_seed(cfg.seed, {kFoldStream, r}));
    for (std::size_t f = 0; f < cfg.folds; ++f) jobs.push_back({r, f, nullptr, {}, {}});
  }
  const auto k = static_cast<std::size_t>(collection.num_classes());
  std::vector<FoldEval> evals(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [r, f] = std::pair(jobs[j].repeat, jobs[j].fold);
    LabeledNodeDataset train;
    train.feature_names = names;
    std::vector<double> test_x;
    std::vector<int> test_y;
    for (std::size_t i = 0; i < count; ++i) {
      const auto& v = summaries[i].values;
      if (fold_of[r][i] == f) {
        test_x.insert(test_x.end(), v.begin(), v.end());
        test_y.push_back(collection.labels[i]);
      } else {
        train.features.insert(train.features.end(), v.begin(), v.end());
        train.labels.push_back(collection.labels[i]);
        train.network_ids.push_back(static_cast<int>(i));
      }
    }
    TrainConfig tc = cfg.forest;
    tc.seed = forest_seed(cfg, r, f);
    const auto model = train_forest(train, tc);
    const auto proba = predict_proba(model, test_x);
    std::size_t correct = 0;
    for (std::size_t t = 0; t < test_y.size(); ++t)
      correct += argmax_class(std::span(proba).subspan(t * k, k)) == test_y[t] ? 1 : 0;
    auto& e = evals[j];
    e.test_units = test_y.size();
    e.train_rows = train.num_rows();
    e.importances = model.importances;
    e.accuracies = {100.0 * static_cast<double>(correct) / static_cast<double>(test_y.size())};
  });
  auto rep = summarize(jobs, evals, cfg, names);
  rep.class_names = collection.class_names;
  rep.class_rows.assign(k, 0);
  for (int l : collection.labels) ++rep.class_rows[static_cast<std::size_t>(l)];
  rep.flags.insert(rep.flags.begin(), flags.begin(), flags.end());
  (void)d;
  return rep;
}

std::string report_to_json(const CvReport& r) {
  json folds = json::array();
  for (const auto& f : r.per_fold)
    folds.push_back({{"repeat", f.repeat},
                     {"fold", f.fold},
                     {"accuracy", f.accuracy},
                     {"test_units", f.test_units},
                     {"train_rows", f.train_rows},
                     {"forest_seed", f.forest_seed}});
  json importances = json::array();
  for (std::size_t i = 0; i < r.feature_names.size(); ++i)
    importances.push_back({{"feature", r.feature_names[i]}, {"mean", r.importance_mean[i]}, {"std", r.importance_std[i]}});
  json generated = json::array();
  for (const auto& g : r.generated)
    generated.push_back(
        {{"repeat", g.repeat}, {"network_id", g.network_id}, {"n", g.n}, {"m", g.m}, {"target_m", g.target_m}});
  json doc{{"accuracy_mean", r.accuracy_mean},
           {"accuracy_std", r.accuracy_std},
           {"per_fold", folds},
           {"feature_importances", importances},
           {"class_names", r.class_names},
           {"class_rows", r.class_rows},
           {"config", config_json(r.config)},
           {"flags", r.flags}};
  if (!r.generated.empty()) doc["generated_models"] = generated;
  return doc.dump(2) + "\n";
}

std::string folds_csv(const CvReport& r) {
  std::ostringstream out;
  out << "fold,repeat,accuracy\n";
  for (const auto& f : r.per_fold) out << f.fold << ',' << f.repeat << ',' << format_double(f.accuracy) << '\n';
  return out.str();
}

std::string importance_csv(const CvReport& r) {
  std::ostringstream out;
  out << "feature,mean,std\n";
  for (std::size_t i = 0; i < r.feature_names.size(); ++i)
    out << r.feature_names[i] << ',' << format_double(r.importance_mean[i]) << ','
        << format_double(r.importance_std[i]) << '\n';
  return out.str();
}

std::string node_scores_csv(const CvReport& r) {
  std::ostringstream out;
  const std::size_t k = r.class_names.size();
  out << "repeat,fold,network_id,label,node_id,predicted";
  for (std::size_t c = 0; c < k; ++c) out << ",score_" << c;
  out << '\n';
  for (const auto& s : r.node_scores) {
    out << s.repeat << ',' << s.fold << ',' << s.network_id << ',' << s.label << ',' << s.node << ',' << s.predicted;
    for (double x : s.scores) out << ',' << format_double(x);
    out << '\n';
  }
  return out.str();
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("mode")) c.mode = parse_experiment_mode(j.at("mode").get<std::string>());
  c.folds = j.value("folds", c.folds);
  c.repeats = j.value("repeats", c.repeats);
  c.lightweight = j.value("lightweight", c.lightweight);
  c.sample_fraction = j.value("sample_fraction", c.sample_fraction);
  c.score_threshold = j.value("score_threshold", c.score_threshold);
  if (j.contains("model_spec") && !j.at("model_spec").is_null()) c.model_spec = spec_from(j.at("model_spec"));
  c.seed = j.value("seed", c.seed);
  if (j.contains("forest")) {
    const auto& f = j.at("forest");
    c.forest.num_trees = f.value("num_trees", c.forest.num_trees);
    c.forest.max_features = f.value("max_features", c.forest.max_features);
    c.forest.min_leaf = f.value("min_leaf", c.forest.min_leaf);
    if (f.contains("max_depth") && !f.at("max_depth").is_null()) c.forest.max_depth = f.at("max_depth").get<std::size_t>();
  }
  c.validate();
  return c;
}

std::string model_spec_to_json(const ModelSpec& spec) { return spec_json(spec).dump(2) + "\n"; }

ModelSpec model_spec_from_json(const std::string& text) { return spec_from(json::parse(text)); }

}  // namespace nodeclass
