#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nodeclass {

// Row-major feature matrix with a class label and an origin network id per row.
struct LabeledNodeDataset {
  std::vector<std::string> feature_names;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<int> network_ids;

  std::size_t num_rows() const { return labels.size(); }
  std::size_t num_features() const { return feature_names.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * num_features(), num_features()};
  }
  // Highest label + 1.
  int num_classes() const;
  // Rows per class, indexed by class id.
  std::vector<std::size_t> class_counts() const;
  // Throws std::invalid_argument on inconsistent sizes or negative labels.
  void validate() const;
};

struct TrainConfig {
  std::size_t num_trees = 100;
  // 0 selects ceil(sqrt(d)).
  std::size_t max_features = 0;
  std::size_t min_leaf = 1;
  std::optional<std::size_t> max_depth;
  std::uint64_t seed = 0;

  std::size_t resolved_max_features(std::size_t d) const;
};

struct TreeNode {
  // Internal nodes: feature >= 0, rows with value <= threshold go left.
  int feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  // Leaves: bootstrap class counts and their majority (ties to the lower id).
  std::vector<std::uint32_t> counts;
  int majority = 0;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  // nodes[0] is the root.
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> row) const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int num_classes = 0;
  std::vector<std::string> feature_names;
  // Fractions summing to 1 when any split exists, all zero otherwise.
  std::vector<double> importances;
  TrainConfig config;

  std::size_t num_features() const { return feature_names.size(); }
};

/// Trains a random forest of Gini-impurity classification trees.
///
/// Each tree sees a bootstrap resample of the rows. At every node
/// `max_features` features are drawn without replacement (more are drawn only
/// if none of them admits a split), candidate thresholds are midpoints between
/// consecutive distinct values, and the split with the largest impurity
/// decrease wins, ties going to the lowest feature index and then the lowest
/// threshold. Trees train in parallel; the model does not depend on the
/// worker count.
ForestModel train_forest(const LabeledNodeDataset& data, const TrainConfig& cfg);

// Row-major rows with model.num_features() columns. Result is rows x classes,
// score = fraction of trees voting for the class.
std::vector<double> predict_proba(const ForestModel& model, std::span<const double> rows);
std::vector<int> predict_label(const ForestModel& model, std::span<const double> rows);

// Argmax with ties to the lower class id.
int argmax_class(std::span<const double> scores);

struct NamedImportance {
  std::string name;
  double percent = 0.0;
};

// Importances as percentages in feature order.
std::vector<NamedImportance> feature_importances(const ForestModel& model);

// Out-of-bag fraction of each tree's bootstrap draw, from the same streams train_forest uses.
std::vector<double> out_of_bag_fractions(std::size_t num_rows, const TrainConfig& cfg);

// Self-describing JSON with a format version; trees are nested split/leaf objects.
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);

}  // namespace nodeclass
