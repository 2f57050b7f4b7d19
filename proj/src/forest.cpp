#include "nodeclass/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "nodeclass/parallel.hpp"
#include "nodeclass/random.hpp"

namespace nodeclass {
namespace {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr std::size_t kPredictBlock = 256;

struct SplitCandidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // sum_c L_c^2/n_L + sum_c R_c^2/n_R, larger is purer
};

bool better(const SplitCandidate& a, const SplitCandidate& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.score != b.score) return a.score > b.score;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.threshold < b.threshold;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& columns, const std::vector<int>& labels, int num_classes,
              const TrainConfig& cfg, std::size_t mtry)
      : columns_(columns), labels_(labels), num_classes_(num_classes), cfg_(cfg), mtry_(mtry),
        importance_(columns.size(), 0.0) {}

  DecisionTree build(Rng& rng) {
    const std::size_t rows = labels_.size();
    std::vector<std::uint32_t> sample(rows);
    for (auto& s : sample) s = static_cast<std::uint32_t>(uniform_index(rng, rows));
    total_ = static_cast<double>(rows);

    DecisionTree tree;
    struct Pending {
      std::size_t node, begin, end, depth;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, rows, 0});
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(num_classes_));
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      std::fill(counts.begin(), counts.end(), 0u);
      for (std::size_t i = p.begin; i < p.end; ++i) ++counts[static_cast<std::size_t>(labels_[sample[i]])];
      const std::size_t n = p.end - p.begin;
      const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
      const bool depth_cap = cfg_.max_depth && p.depth >= *cfg_.max_depth;

      SplitCandidate best;
      if (!pure && !depth_cap && n >= 2 * cfg_.min_leaf) best = find_split(sample, p.begin, p.end, counts, rng);
      if (!best.valid) {
        auto& leaf = tree.nodes[p.node];
        leaf.counts = counts;
        leaf.majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        continue;
      }

      double parent = 0.0;
      for (auto c : counts) parent += static_cast<double>(c) * static_cast<double>(c);
      parent /= static_cast<double>(n);
      importance_[static_cast<std::size_t>(best.feature)] += (best.score - parent) / total_;

      const auto& col = columns_[static_cast<std::size_t>(best.feature)];
      const auto mid = std::partition(sample.begin() + static_cast<std::ptrdiff_t>(p.begin),
                                      sample.begin() + static_cast<std::ptrdiff_t>(p.end),
                                      [&](std::uint32_t r) { return col[r] <= best.threshold; });
      const auto split_at = static_cast<std::size_t>(mid - sample.begin());
      const auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[p.node];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({static_cast<std::size_t>(left + 1), split_at, p.end, p.depth + 1});
      stack.push_back({static_cast<std::size_t>(left), p.begin, split_at, p.depth + 1});
    }
    return tree;
  }

  const std::vector<double>& importance() const { return importance_; }

 private:
  SplitCandidate find_split(const std::vector<std::uint32_t>& sample, std::size_t begin, std::size_t end,
                            const std::vector<std::uint32_t>& counts, Rng& rng) {
    const std::size_t d = columns_.size();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitCandidate best;
    // Draw features without replacement; keep drawing past mtry only while no
    // drawn feature admits a split.
    for (std::size_t drawn = 0; drawn < d; ++drawn) {
      if (drawn >= mtry_ && best.valid) break;
      std::swap(order[drawn], order[drawn + uniform_index(rng, d - drawn)]);
      const auto cand = evaluate(order[drawn], sample, begin, end, counts);
      if (better(cand, best)) best = cand;
    }
    return best;
  }

  SplitCandidate evaluate(std::size_t f, const std::vector<std::uint32_t>& sample, std::size_t begin,
                          std::size_t end, const std::vector<std::uint32_t>& counts) {
    const auto& col = columns_[f];
    const std::size_t n = end - begin;
    values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = sample[begin + i];
      values_[i] = {col[r], labels_[r]};
    }
    std::sort(values_.begin(), values_.end());
    SplitCandidate best;
    if (values_.front().first == values_.back().first) return best;

    left_.assign(static_cast<std::size_t>(num_classes_), 0.0);
    right_.assign(counts.begin(), counts.end());
    double sum_left = 0.0;
    double sum_right = 0.0;
    for (double c : right_) sum_right += c * c;
    const std::size_t min_leaf = cfg_.min_leaf;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto c = static_cast<std::size_t>(values_[i].second);
      sum_left += 2.0 * left_[c] + 1.0;
      left_[c] += 1.0;
      sum_right -= 2.0 * right_[c] - 1.0;
      right_[c] -= 1.0;
      const double v = values_[i].first;
      const double next = values_[i + 1].first;
      if (v == next) continue;
      const std::size_t n_left = i + 1;
      if (n_left < min_leaf || n - n_left < min_leaf) continue;
      const double score = sum_left / static_cast<double>(n_left) + sum_right / static_cast<double>(n - n_left);
      if (!best.valid || score > best.score) {
        double threshold = v + (next - v) / 2.0;
        if (!(threshold < next)) threshold = v;
        best = {true, static_cast<int>(f), threshold, score};
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& columns_;
  const std::vector<int>& labels_;
  int num_classes_;
  const TrainConfig& cfg_;
  std::size_t mtry_;
  double total_ = 1.0;
  std::vector<double> importance_;
  std::vector<std::pair<double, int>> values_;
  std::vector<double> left_, right_;
};

json tree_to_json(const DecisionTree& tree, std::size_t index) {
  const auto& node = tree.nodes[index];
  if (node.is_leaf()) return json{{"counts", node.counts}};
  return json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", tree_to_json(tree, static_cast<std::size_t>(node.left))},
              {"right", tree_to_json(tree, static_cast<std::size_t>(node.right))}};
}

std::size_t tree_from_json(const json& j, DecisionTree& tree) {
  const std::size_t index = tree.nodes.size();
  tree.nodes.emplace_back();
  if (j.contains("counts")) {
    auto counts = j.at("counts").get<std::vector<std::uint32_t>>();
    const int majority = counts.empty()
                             ? 0
                             : static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    tree.nodes[index].counts = std::move(counts);
    tree.nodes[index].majority = majority;
    return index;
  }
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  const auto left = tree_from_json(j.at("left"), tree);
  const auto right = tree_from_json(j.at("right"), tree);
  auto& node = tree.nodes[index];
  node.feature = feature;
  node.threshold = threshold;
  node.left = static_cast<std::int32_t>(left);
  node.right = static_cast<std::int32_t>(right);
  return index;
}

}  // namespace

int LabeledNodeDataset::num_classes() const {
  int c = 0;
  for (int l : labels) c = std::max(c, l + 1);
  return c;
}

std::vector<std::size_t> LabeledNodeDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes()), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

void LabeledNodeDataset::validate() const {
  if (features.size() != num_rows() * num_features())
    throw std::invalid_argument("dataset: feature matrix size does not match rows x features");
  if (network_ids.size() != num_rows()) throw std::invalid_argument("dataset: network id count mismatch");
  for (int l : labels)
    if (l < 0) throw std::invalid_argument("dataset: negative class label");
}

std::size_t TrainConfig::resolved_max_features(std::size_t d) const {
  if (max_features == 0) return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
  return std::min(max_features, d);
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

ForestModel train_forest(const LabeledNodeDataset& data, const TrainConfig& cfg) {
  data.validate();
  if (data.num_rows() == 0) throw std::invalid_argument("train_forest: empty dataset");
  if (cfg.num_trees < 1) throw std::invalid_argument("train_forest: num_trees must be >= 1");
  if (cfg.min_leaf < 1) throw std::invalid_argument("train_forest: min_leaf must be >= 1");
  const std::size_t d = data.num_features();
  if (d == 0) throw std::invalid_argument("train_forest: no features");
  if (cfg.max_features > d) throw std::invalid_argument("train_forest: max_features exceeds feature count");
  for (double x : data.features)
    if (!std::isfinite(x)) throw std::invalid_argument("train_forest: non-finite feature value");
  const auto class_counts = data.class_counts();
  const auto present = std::count_if(class_counts.begin(), class_counts.end(), [](std::size_t c) { return c > 0; });
  if (present < 2) throw std::invalid_argument("train_forest: need at least two classes");

  std::vector<std::vector<double>> columns(d, std::vector<double>(data.num_rows()));
  for (std::size_t r = 0; r < data.num_rows(); ++r)
    for (std::size_t f = 0; f < d; ++f) columns[f][r] = data.features[r * d + f];

  ForestModel model;
  model.num_classes = data.num_classes();
  model.feature_names = data.feature_names;
  model.config = cfg;
  model.trees.resize(cfg.num_trees);
  std::vector<std::vector<double>> tree_importance(cfg.num_trees);
  const std::size_t mtry = cfg.resolved_max_features(d);
  parallel_for(cfg.num_trees, [&](std::size_t t) {
    Rng rng(derive_seed(cfg.seed, {t}));
    TreeBuilder builder(columns, data.labels, model.num_classes, cfg, mtry);
    model.trees[t] = builder.build(rng);
    tree_importance[t] = builder.importance();
  });

  model.importances.assign(d, 0.0);
  for (const auto& imp : tree_importance) {
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total <= 0.0) continue;
    for (std::size_t f = 0; f < d; ++f) model.importances[f] += imp[f] / total;
  }
  const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
  if (total > 0.0)
    for (auto& x : model.importances) x /= total;
  return model;
}

std::vector<double> predict_proba(const ForestModel& model, std::span<const double> rows) {
  const std::size_t d = model.num_features();
  if (d == 0 || rows.size() % d != 0) throw std::invalid_argument("predict_proba: column count does not match model");
  const std::size_t n = rows.size() / d;
  const auto k = static_cast<std::size_t>(model.num_classes);
  std::vector<double> out(n * k, 0.0);
  const std::size_t blocks = (n + kPredictBlock - 1) / kPredictBlock;
  const double weight = 1.0 / static_cast<double>(model.trees.size());
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kPredictBlock);
    std::vector<std::size_t> votes(k);
    for (std::size_t r = b * kPredictBlock; r < end; ++r) {
      std::fill(votes.begin(), votes.end(), 0);
      const auto row = rows.subspan(r * d, d);
      for (const auto& tree : model.trees) ++votes[static_cast<std::size_t>(tree.leaf_for(row).majority)];
      for (std::size_t c = 0; c < k; ++c) out[r * k + c] = static_cast<double>(votes[c]) * weight;
    }
  });
  return out;
}

int argmax_class(std::span<const double> scores) {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::vector<int> predict_label(const ForestModel& model, std::span<const double> rows) {
  const auto proba = predict_proba(model, rows);
  const auto k = static_cast<std::size_t>(model.num_classes);
  const std::size_t n = k == 0 ? 0 : proba.size() / k;
  std::vector<int> labels(n);
  for (std::size_t r = 0; r < n; ++r) labels[r] = argmax_class(std::span(proba).subspan(r * k, k));
  return labels;
}

std::vector<NamedImportance> feature_importances(const ForestModel& model) {
  std::vector<NamedImportance> out;
  for (std::size_t f = 0; f < model.num_features(); ++f)
    out.push_back({model.feature_names[f], 100.0 * model.importances[f]});
  return out;
}

std::vector<double> out_of_bag_fractions(std::size_t num_rows, const TrainConfig& cfg) {
  std::vector<double> out(cfg.num_trees);
  std::vector<std::uint8_t> seen(num_rows);
  for (std::size_t t = 0; t < cfg.num_trees; ++t) {
    Rng rng(derive_seed(cfg.seed, {t}));
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t i = 0; i < num_rows; ++i) seen[uniform_index(rng, num_rows)] = 1;
    const auto in_bag = static_cast<double>(std::count(seen.begin(), seen.end(), 1));
    out[t] = 1.0 - in_bag / static_cast<double>(num_rows);
  }
  return out;
}

std::string forest_to_json(const ForestModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(tree_to_json(t, 0));
  json cfg{{"num_trees", model.config.num_trees},
           {"max_features", model.config.max_features},
           {"min_leaf", model.config.min_leaf},
           {"max_depth", model.config.max_depth ? json(*model.config.max_depth) : json(nullptr)},
           {"seed", model.config.seed}};
  json doc{{"format", "nodeclass-random-forest"},
           {"version", kFormatVersion},
           {"num_classes", model.num_classes},
           {"feature_names", model.feature_names},
           {"importances", model.importances},
           {"config", cfg},
           {"trees", trees}};
  return doc.dump(1);
}

ForestModel forest_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (!doc.contains("version")) throw std::invalid_argument("forest JSON: missing version");
  if (doc.at("version").get<int>() != kFormatVersion)
    throw std::invalid_argument("forest JSON: unsupported version " + doc.at("version").dump());
  ForestModel model;
  model.num_classes = doc.at("num_classes").get<int>();
  model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  model.importances = doc.at("importances").get<std::vector<double>>();
  const auto& cfg = doc.at("config");
  model.config.num_trees = cfg.at("num_trees").get<std::size_t>();
  model.config.max_features = cfg.at("max_features").get<std::size_t>();
  model.config.min_leaf = cfg.at("min_leaf").get<std::size_t>();
  if (!cfg.at("max_depth").is_null()) model.config.max_depth = cfg.at("max_depth").get<std::size_t>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  for (const auto& t : doc.at("trees")) {
    DecisionTree tree;
    tree_from_json(t, tree);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace nodeclass
