#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nodeclass/features.hpp"
#include "nodeclass/forest.hpp"
#include "nodeclass/graph.hpp"
#include "nodeclass/models.hpp"

namespace nodeclass {

enum class ExperimentMode { kNodeCv, kNetworkCv, kRealVsModel, kWholeNetwork };

std::string_view experiment_mode_name(ExperimentMode m);
ExperimentMode parse_experiment_mode(std::string_view s);

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kNetworkCv;
  std::size_t folds = 10;
  std::size_t repeats = 10;
  bool lightweight = false;
  // Fraction of nodes sampled per test network in whole-network classification.
  double sample_fraction = 1.0;
  double score_threshold = 0.8;
  // Model for real-vs-model runs; n, m and the degree sequence are matched per real graph.
  std::optional<ModelSpec> model_spec;
  std::uint64_t seed = 0;
  TrainConfig forest;

  void validate() const;
};

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  // Percentage of correctly classified test units (nodes or networks).
  double accuracy = 0.0;
  std::size_t test_units = 0;
  std::size_t train_rows = 0;
  std::uint64_t forest_seed = 0;
};

// One scored test node, kept for score-distribution plots.
struct NodeScore {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  int network_id = 0;
  int label = 0;
  NodeId node = 0;
  int predicted = 0;
  std::vector<double> scores;
};

// Realized size of a generated model network.
struct GeneratedModel {
  std::size_t repeat = 0;
  int network_id = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t target_m = 0;
};

struct CvReport {
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  std::vector<FoldResult> per_fold;
  std::vector<std::string> feature_names;
  // Percentages.
  std::vector<double> importance_mean;
  std::vector<double> importance_std;
  std::vector<std::size_t> class_rows;
  std::vector<std::string> class_names;
  ExperimentConfig config;
  std::vector<std::string> flags;
  std::vector<NodeScore> node_scores;
  std::vector<GeneratedModel> generated;
};

struct NodeSource {
  const Graph& graph;
  int label;
  int network_id;
};

// Features for each graph. Every graph uses the same community-detection seed
// so identical graphs yield identical rows.
std::vector<FeatureMatrix> compute_features(std::span<const Graph> graphs, bool lightweight, std::uint64_t seed);

LabeledNodeDataset build_node_dataset(std::span<const NodeSource> sources, bool lightweight, std::uint64_t seed,
                                      std::vector<std::string>* flags = nullptr);

/// Stratified fold ids for units with class `labels`. Within each class,
/// units are ordered by a random key indexed by their rank inside the class and
/// dealt round-robin. The key table is shared by all classes, so the i-th
/// unit of every class lands in the same fold.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

// Ego networks (ego excluded) of up to `count` distinct egos drawn uniformly
// from the nodes whose ego network has at least `min_nodes` nodes.
std::vector<Graph> sample_ego_networks(const Graph& g, std::size_t count, std::size_t min_nodes, std::uint64_t seed);

// Node-level CV: class i is graphs[i]; folds partition nodes.
CvReport kfold_node_cv(std::span<const Graph> graphs, const ExperimentConfig& cfg);

// Network-level CV: folds partition networks; accuracy pools all test nodes.
CvReport kfold_network_cv(const GraphCollection& collection, const ExperimentConfig& cfg);

// Real (class 0) vs freshly generated matched model networks (class 1), with
// network-level folds. Every repeat regenerates the models.
CvReport real_vs_model_experiment(std::span<const Graph> reals, ModelKind kind, const ExperimentConfig& cfg);

// Whole-network classification by averaging node scores over a sample of
// ceil(p * n) nodes, for each fraction p. Training is shared across fractions.
std::vector<CvReport> whole_network_classify(const GraphCollection& collection, const ExperimentConfig& cfg,
                                             std::span<const double> fractions);
CvReport whole_network_classify(const GraphCollection& collection, const ExperimentConfig& cfg);

// Global statistics per network in the order of network_feature_names().
struct NetworkSummary {
  std::vector<double> values;
  bool assortativity_undefined = false;
};
std::vector<std::string> network_feature_names();
NetworkSummary network_features(const Graph& g);

// Pearson degree correlation over edges; nullopt when undefined.
std::optional<double> degree_assortativity(const Graph& g);

// One row of global statistics per network, random forest over networks.
CvReport feature_based_baseline(const GraphCollection& collection, const ExperimentConfig& cfg);

std::string report_to_json(const CvReport& report);
std::string folds_csv(const CvReport& report);
std::string importance_csv(const CvReport& report);
std::string node_scores_csv(const CvReport& report);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
std::string model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const std::string& text);

}  // namespace nodeclass
