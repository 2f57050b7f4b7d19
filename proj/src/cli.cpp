#include "nodeclass/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nodeclass/bootstrap.hpp"
#include "nodeclass/errors.hpp"
#include "nodeclass/experiments.hpp"
#include "nodeclass/features.hpp"
#include "nodeclass/forest.hpp"
#include "nodeclass/io.hpp"
#include "nodeclass/models.hpp"
#include "nodeclass/parallel.hpp"

namespace nodeclass {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> inputs;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string config;
  int verbosity = 0;
  bool lightweight = false;
  bool one_indexed = false;
  std::string dataset;
  std::string data_dir;
  std::size_t folds = 10;
  std::size_t repeats = 10;
  std::size_t trees = 100;
  std::string model = "er";
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t count = 1;
  std::string like;
  double rewire_p = 0.1;
  double triangle_p = 1.0;
  std::vector<double> fractions;
  std::string original;
  std::string attachment = "vertex-copy";
  double beta = 0.9;
  double growth_rate = 0.05;
  double threshold = 0.8;
  std::size_t max_iterations = 500;
  int max_trials = 0;
  std::size_t seed_min_nodes = 20;
  std::size_t snapshot_every = 0;
};

// Collects outputs and the manifest for one run.
class Run {
 public:
  Run(std::string subcommand, const Options& opt, std::uint64_t seed, bool seed_given)
      : subcommand_(std::move(subcommand)), out_(opt.out), seed_(seed), verbose_(opt.verbosity > 0) {
    manifest_["tool"] = "nodeclass";
    manifest_["version"] = std::string(kVersion);
    manifest_["subcommand"] = subcommand_;
    manifest_["seed"] = seed;
    manifest_["seed_source"] = seed_given ? "flag" : "random";
    manifest_["inputs"] = opt.inputs;
  }

  std::uint64_t seed() const { return seed_; }
  json& manifest() { return manifest_; }

  void write(const std::string& name, const std::string& contents) {
    write_text_file(out_ / name, contents);
    outputs_.push_back(name);
    log("wrote " + (out_ / name).string());
  }

  // Registers a file written by other means.
  void record(const std::string& name) { outputs_.push_back(name); }

  void log(const std::string& msg) const {
    if (verbose_) std::cerr << "[" << subcommand_ << "] " << msg << '\n';
  }

  void finish() {
    std::sort(outputs_.begin(), outputs_.end());
    manifest_["outputs"] = outputs_;
    write_text_file(out_ / "manifest.json", manifest_.dump(2) + "\n");
  }

  const fs::path& out() const { return out_; }

 private:
  std::string subcommand_;
  fs::path out_;
  std::uint64_t seed_;
  bool verbose_;
  json manifest_;
  std::vector<std::string> outputs_;
};

Graph load_graph(const std::string& path, const Options& opt, Run& run) {
  auto loaded = load_edge_list(path, opt.one_indexed);
  if (loaded.summary.dropped() > 0)
    run.log(path + ": dropped " + std::to_string(loaded.summary.self_loops) + " self-loops and " +
            std::to_string(loaded.summary.duplicates) + " duplicate edges");
  return std::move(loaded.graph);
}

std::vector<Graph> load_inputs(const Options& opt, Run& run) {
  std::vector<Graph> graphs;
  for (const auto& p : opt.inputs) graphs.push_back(load_graph(p, opt, run));
  return graphs;
}

fs::path resolve_data_dir(const Options& opt) {
  if (!opt.data_dir.empty()) return opt.data_dir;
  if (const char* env = std::getenv("NODECLASS_DATA_DIR")) return env;
  return "data";
}

GraphCollection load_dataset(const Options& opt, Run& run) {
  if (opt.dataset.empty()) throw UsageError("--dataset is required");
  const fs::path base = resolve_data_dir(opt);
  const fs::path dir = fs::is_directory(base / opt.dataset) ? base / opt.dataset : base;
  run.log("loading " + opt.dataset + " from " + dir.string());
  auto collection = load_tu_dataset(dir, opt.dataset);
  run.manifest()["dataset"] = {{"name", opt.dataset}, {"graphs", collection.size()}, {"classes", collection.class_names}};
  return collection;
}

ExperimentConfig experiment_config(const Options& opt, const CLI::App& sub, ExperimentMode mode, std::uint64_t seed) {
  ExperimentConfig cfg;
  if (!opt.config.empty()) {
    std::ifstream in(opt.config);
    if (!in) throw IoError("cannot open " + opt.config);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      cfg = config_from_json(ss.str());
    } catch (const json::exception& ex) {
      throw FormatError(opt.config + ": " + ex.what());
    }
  }
  cfg.mode = mode;
  cfg.seed = seed;
  auto given = [&](const char* flag) { return sub.count(flag) > 0 || opt.config.empty(); };
  if (given("--folds")) cfg.folds = opt.folds;
  if (given("--repeats")) cfg.repeats = opt.repeats;
  if (given("--trees")) cfg.forest.num_trees = opt.trees;
  if (sub.count("--lightweight") > 0) cfg.lightweight = true;
  cfg.validate();
  return cfg;
}

void write_report(Run& run, const CvReport& report) {
  run.write("report.json", report_to_json(report));
  run.write("folds.csv", folds_csv(report));
  run.write("importance.csv", importance_csv(report));
  if (!report.node_scores.empty()) run.write("node_scores.csv", node_scores_csv(report));
  for (const auto& f : report.flags) run.log("flag: " + f);
  std::cout << std::fixed << std::setprecision(2) << "accuracy " << report.accuracy_mean << " +- "
            << report.accuracy_std << '\n';
}

void cmd_features(const Options& opt, Run& run) {
  if (opt.inputs.size() != 1) throw UsageError("features takes exactly one --input");
  const Graph g = load_graph(opt.inputs.front(), opt, run);
  const auto fm = extract_features(g, opt.lightweight, run.seed());
  run.manifest()["lightweight"] = opt.lightweight;
  run.write("features.csv", fm.to_csv());
  run.write("communities.csv", partition_csv(detect_communities(g, kDefaultResolution, run.seed())));
}

void cmd_stats(const Options& opt, Run& run) {
  if (opt.inputs.empty()) throw UsageError("stats needs at least one --input");
  json all = json::array();
  for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
    const Graph g = load_graph(opt.inputs[i], opt, run);
    const auto s = graph_stats(g);
    all.push_back({{"input", opt.inputs[i]},
                   {"n", s.n},
                   {"m", s.m},
                   {"avg_degree", s.avg_degree},
                   {"density", s.density},
                   {"transitivity", s.transitivity},
                   {"diameter", s.diameter},
                   {"connected", s.connected}});
  }
  run.write("stats.json", all.dump(2) + "\n");
}

void cmd_generate(const Options& opt, Run& run, const CLI::App& sub) {
  const auto kind = parse_model_kind(opt.model);
  std::optional<Graph> like;
  if (!opt.like.empty()) like = load_graph(opt.like, opt, run);
  json specs = json::array();
  for (std::size_t i = 0; i < opt.count; ++i) {
    const auto seed = derive_seed(run.seed(), {i});
    ModelSpec spec;
    if (like) {
      spec = matched_spec(kind, *like, seed);
    } else {
      if (kind == ModelKind::kConfiguration) throw UsageError("configuration model needs --like");
      if (sub.count("--n") == 0 || sub.count("--m") == 0) throw UsageError("generate needs --n and --m or --like");
      spec.kind = kind;
      spec.n = opt.n;
      spec.m = opt.m;
      spec.seed = seed;
    }
    spec.ws_rewire_p = opt.rewire_p;
    spec.hk_triangle_p = opt.triangle_p;
    const Graph g = generate(spec);
    std::ostringstream name;
    std::string stem(model_kind_name(kind));
    std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char c) { return std::tolower(c); });
    name << stem << '_' << std::setw(4) << std::setfill('0') << i << ".edges";
    export_graph(g, {}, run.out() / name.str());
    run.record(name.str());
    run.write(name.str() + ".spec.json", model_spec_to_json(spec));
    specs.push_back({{"file", name.str()}, {"n", g.num_nodes()}, {"m", g.num_edges()}});
  }
  run.write("generated.json", specs.dump(2) + "\n");
}

void cmd_train(const Options& opt, Run& run) {
  LabeledNodeDataset data;
  std::vector<std::string> flags;
  if (!opt.dataset.empty()) {
    const auto col = load_dataset(opt, run);
    std::vector<NodeSource> sources;
    for (std::size_t i = 0; i < col.size(); ++i) sources.push_back({col.graphs[i], col.labels[i], static_cast<int>(i)});
    data = build_node_dataset(sources, opt.lightweight, derive_seed(run.seed(), {1}), &flags);
  } else {
    if (opt.inputs.size() < 2) throw UsageError("train needs --dataset or one --input per class");
    const auto graphs = load_inputs(opt, run);
    std::vector<NodeSource> sources;
    for (std::size_t i = 0; i < graphs.size(); ++i)
      sources.push_back({graphs[i], static_cast<int>(i), static_cast<int>(i)});
    data = build_node_dataset(sources, opt.lightweight, derive_seed(run.seed(), {1}), &flags);
  }
  for (const auto& f : flags) run.log("flag: " + f);
  TrainConfig tc;
  tc.num_trees = opt.trees;
  tc.seed = derive_seed(run.seed(), {2});
  const auto model = train_forest(data, tc);
  run.write("model.json", forest_to_json(model));
  std::ostringstream imp;
  imp << "feature,percent\n";
  for (const auto& fi : feature_importances(model)) imp << fi.name << ',' << format_double(fi.percent) << '\n';
  run.write("importance.csv", imp.str());
}

void cmd_node_cv(const Options& opt, Run& run, const CLI::App& sub) {
  if (opt.inputs.size() < 2) throw UsageError("node-cv needs at least two --input graphs");
  const auto graphs = load_inputs(opt, run);
  const auto cfg = experiment_config(opt, sub, ExperimentMode::kNodeCv, run.seed());
  run.manifest()["config"] = json::parse(config_to_json(cfg));
  write_report(run, kfold_node_cv(graphs, cfg));
}

void cmd_network_cv(const Options& opt, Run& run, const CLI::App& sub) {
  const auto col = load_dataset(opt, run);
  const auto cfg = experiment_config(opt, sub, ExperimentMode::kNetworkCv, run.seed());
  run.manifest()["config"] = json::parse(config_to_json(cfg));
  write_report(run, kfold_network_cv(col, cfg));
}

void cmd_real_vs_model(const Options& opt, Run& run, const CLI::App& sub) {
  std::vector<Graph> reals;
  if (!opt.dataset.empty())
    reals = load_dataset(opt, run).graphs;
  else
    reals = load_inputs(opt, run);
  if (reals.empty()) throw UsageError("real-vs-model needs --input or --dataset");
  auto cfg = experiment_config(opt, sub, ExperimentMode::kRealVsModel, run.seed());
  ModelSpec spec;
  spec.kind = parse_model_kind(opt.model);
  spec.ws_rewire_p = opt.rewire_p;
  spec.hk_triangle_p = opt.triangle_p;
  cfg.model_spec = spec;
  run.manifest()["config"] = json::parse(config_to_json(cfg));
  write_report(run, real_vs_model_experiment(reals, spec.kind, cfg));
}

void cmd_classify_networks(const Options& opt, Run& run, const CLI::App& sub) {
  const auto col = load_dataset(opt, run);
  const auto cfg = experiment_config(opt, sub, ExperimentMode::kWholeNetwork, run.seed());
  std::vector<double> fractions = opt.fractions;
  if (fractions.empty()) fractions.push_back(cfg.sample_fraction);
  run.manifest()["config"] = json::parse(config_to_json(cfg));
  run.manifest()["fractions"] = fractions;
  const auto reports = whole_network_classify(col, cfg, fractions);
  json all = json::array();
  std::ostringstream curve;
  curve << "fraction,accuracy_mean,accuracy_std\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    all.push_back(json::parse(report_to_json(reports[i])));
    curve << format_double(fractions[i]) << ',' << format_double(reports[i].accuracy_mean) << ','
          << format_double(reports[i].accuracy_std) << '\n';
    std::cout << "p=" << format_double(fractions[i]) << " accuracy " << std::fixed << std::setprecision(2)
              << reports[i].accuracy_mean << " +- " << reports[i].accuracy_std << std::defaultfloat << '\n';
  }
  run.write("report.json", all.dump(2) + "\n");
  run.write("accuracy_by_fraction.csv", curve.str());
  std::ostringstream folds;
  folds << "fraction,fold,repeat,accuracy\n";
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (const auto& f : reports[i].per_fold)
      folds << format_double(fractions[i]) << ',' << f.fold << ',' << f.repeat << ',' << format_double(f.accuracy)
            << '\n';
  run.write("folds.csv", folds.str());
}

void cmd_baseline(const Options& opt, Run& run, const CLI::App& sub) {
  const auto col = load_dataset(opt, run);
  const auto cfg = experiment_config(opt, sub, ExperimentMode::kNetworkCv, run.seed());
  run.manifest()["config"] = json::parse(config_to_json(cfg));
  write_report(run, feature_based_baseline(col, cfg));
}

void cmd_bootstrap(const Options& opt, Run& run) {
  if (opt.original.empty()) throw UsageError("bootstrap needs --original");
  const Graph original = load_graph(opt.original, opt, run);
  GrowthConfig gc;
  gc.beta = opt.beta;
  gc.attachment = parse_attachment(opt.attachment);
  gc.growth_rate = opt.growth_rate;
  gc.score_threshold = opt.threshold;
  gc.max_iterations = opt.max_iterations;
  gc.max_trials = opt.max_trials;
  gc.rescore_lightweight = opt.lightweight;
  gc.seed = derive_seed(run.seed(), {3});
  gc.validate();
  TrainConfig tc;
  tc.num_trees = opt.trees;
  run.log("training classifier");
  const auto classifier = train_growth_classifier(original, opt.lightweight, tc, derive_seed(run.seed(), {1}));
  const Graph seed_graph = select_seed_ego(original, opt.seed_min_nodes, derive_seed(run.seed(), {2}));
  run.manifest()["growth"] = {{"beta", gc.beta},
                              {"attachment", attachment_name(gc.attachment)},
                              {"growth_rate", gc.growth_rate},
                              {"score_threshold", gc.score_threshold},
                              {"max_iterations", gc.max_iterations},
                              {"max_trials", gc.max_trials},
                              {"rescore_lightweight", gc.rescore_lightweight},
                              {"num_trees", tc.num_trees},
                              {"seed_nodes", seed_graph.num_nodes()},
                              {"snapshot_every", opt.snapshot_every}};
  auto observer = [&](const GrowthRecord& rec, const Graph& g) {
    run.log("iteration " + std::to_string(rec.iteration) + ": n=" + std::to_string(rec.n_after));
    if (opt.snapshot_every > 0 && (rec.iteration + 1) % opt.snapshot_every == 0) {
      std::ostringstream name;
      name << "snapshots/iter_" << std::setw(4) << std::setfill('0') << rec.iteration + 1 << ".edges";
      export_graph(g, {}, run.out() / name.str());
      run.record(name.str());
    }
  };
  const auto result = grow_network(seed_graph, original, classifier, gc, observer);
  run.write("trace.csv", result.trace.to_csv());
  export_graph(result.graph, {}, run.out() / "grown.edges");
  run.record("grown.edges");
  const json summary{{"status", growth_status_name(result.trace.status)},
                     {"iterations", result.trace.records.size()},
                     {"target_n", result.trace.target_n},
                     {"final_n", result.graph.num_nodes()},
                     {"final_m", result.graph.num_edges()}};
  run.write("summary.json", summary.dump(2) + "\n");
  std::cout << growth_status_name(result.trace.status) << " n=" << result.graph.num_nodes() << '\n';
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--out,-o", opt.out, "Output directory");
  sub->add_option("--seed", opt.seed, "Master seed (random when omitted)");
  sub->add_option("--jobs,-j", opt.jobs, "Worker threads (0 = all cores)");
  sub->add_flag("-v,--verbose", opt.verbosity, "Progress on stderr");
}

void add_experiment(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "Experiment config JSON")->check(CLI::ExistingFile);
  sub->add_option("--folds", opt.folds, "Folds")->check(CLI::PositiveNumber);
  sub->add_option("--repeats", opt.repeats, "Repeats")->check(CLI::PositiveNumber);
  sub->add_option("--trees", opt.trees, "Trees per forest")->check(CLI::PositiveNumber);
  sub->add_flag("--lightweight", opt.lightweight, "Drop betweenness and closeness");
}

void add_dataset(CLI::App* sub, Options& opt) {
  sub->add_option("--dataset", opt.dataset, "TU dataset name");
  sub->add_option("--data-dir", opt.data_dir, "Directory holding TU datasets");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Node-level network classification toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options opt;

  auto* features = app.add_subcommand("features", "Node feature table for one graph");
  features->add_option("--input,-i", opt.inputs, "Edge list")->required();
  features->add_flag("--lightweight", opt.lightweight, "Drop betweenness and closeness");

  auto* stats = app.add_subcommand("stats", "Global statistics per graph");
  stats->add_option("--input,-i", opt.inputs, "Edge list (repeatable)")->required();

  auto* gen = app.add_subcommand("generate", "Random model graphs");
  gen->add_option("--model", opt.model, "er, configuration, ba, ws or holme-kim");
  gen->add_option("--n", opt.n, "Nodes");
  gen->add_option("--m", opt.m, "Edges");
  gen->add_option("--like", opt.like, "Match n, m and degrees of this edge list");
  gen->add_option("--count", opt.count, "Number of graphs")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "Train a node classifier");
  train->add_option("--input,-i", opt.inputs, "Edge list per class (repeatable)");
  train->add_option("--trees", opt.trees, "Trees")->check(CLI::PositiveNumber);
  train->add_flag("--lightweight", opt.lightweight, "Drop betweenness and closeness");
  add_dataset(train, opt);

  auto* node_cv = app.add_subcommand("node-cv", "Node-level cross-validation, one class per graph");
  node_cv->add_option("--input,-i", opt.inputs, "Edge list per class (repeatable)")->required();
  add_experiment(node_cv, opt);

  auto* net_cv = app.add_subcommand("network-cv", "Network-level cross-validation on a TU dataset");
  add_dataset(net_cv, opt);
  add_experiment(net_cv, opt);

  auto* rvm = app.add_subcommand("real-vs-model", "Real networks against matched model networks");
  rvm->add_option("--input,-i", opt.inputs, "Real edge list (repeatable)");
  rvm->add_option("--model", opt.model, "er, configuration, ba, ws or holme-kim");
  add_dataset(rvm, opt);
  add_experiment(rvm, opt);

  auto* cls = app.add_subcommand("classify-networks", "Whole-network classification from node samples");
  cls->add_option("--fraction,-p", opt.fractions, "Sampled node fraction (repeatable)")
      ->check(CLI::Range(0.0, 1.0));
  add_dataset(cls, opt);
  add_experiment(cls, opt);

  auto* base = app.add_subcommand("baseline", "Random forest on global network statistics");
  add_dataset(base, opt);
  add_experiment(base, opt);

  auto* boot = app.add_subcommand("bootstrap", "Grow a network from an ego seed");
  boot->add_option("--original", opt.original, "Original edge list")->required();
  boot->add_option("--attachment", opt.attachment, "vertex-copy or triadic-closure");
  boot->add_option("--beta", opt.beta, "Copy / closure probability")->check(CLI::Range(0.0, 1.0));
  boot->add_option("--growth-rate", opt.growth_rate, "Fraction of nodes added per iteration");
  boot->add_option("--threshold", opt.threshold, "Minimum real-class score")->check(CLI::Range(0.0, 1.0));
  boot->add_option("--max-iterations", opt.max_iterations, "Iteration cap");
  boot->add_option("--max-trials", opt.max_trials, "Draws per attachment (0 = 10 x degree)");
  boot->add_option("--seed-min-nodes", opt.seed_min_nodes, "Minimum size of the seed ego network");
  boot->add_option("--snapshot-every", opt.snapshot_every, "Export the graph every k iterations");
  boot->add_option("--trees", opt.trees, "Trees")->check(CLI::PositiveNumber);
  boot->add_flag("--lightweight", opt.lightweight, "Drop betweenness and closeness");

  for (auto* sub : {features, stats, gen, train, node_cv, net_cv, rvm, cls, base, boot}) add_common(sub, opt);
  for (auto* sub : {gen, rvm}) {
    sub->add_option("--rewire-p", opt.rewire_p, "Watts-Strogatz rewiring probability");
    sub->add_option("--triangle-p", opt.triangle_p, "Holme-Kim triad formation probability");
  }
  for (auto* sub : {features, stats, train, node_cv, rvm, boot})
    sub->add_flag("--one-indexed", opt.one_indexed, "Edge list ids start at 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const bool seed_given = opt.seed.has_value();
  const std::uint64_t seed = seed_given ? *opt.seed : (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^
                                                          std::random_device{}();
  set_max_jobs(opt.jobs);
  try {
    Run run(sub->get_name(), opt, seed, seed_given);
    const std::string name = sub->get_name();
    if (name == "features") cmd_features(opt, run);
    else if (name == "stats") cmd_stats(opt, run);
    else if (name == "generate") cmd_generate(opt, run, *sub);
    else if (name == "train") cmd_train(opt, run);
    else if (name == "node-cv") cmd_node_cv(opt, run, *sub);
    else if (name == "network-cv") cmd_network_cv(opt, run, *sub);
    else if (name == "real-vs-model") cmd_real_vs_model(opt, run, *sub);
    else if (name == "classify-networks") cmd_classify_networks(opt, run, *sub);
    else if (name == "baseline") cmd_baseline(opt, run, *sub);
    else if (name == "bootstrap") cmd_bootstrap(opt, run);
    run.finish();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << sub->help();
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace nodeclass
