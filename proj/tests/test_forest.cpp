#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nodeclass/forest.hpp"
#include "nodeclass/parallel.hpp"

using namespace nodeclass;

namespace {

// Two Gaussian blobs in `d` dimensions; only the first `informative` columns separate them.
LabeledNodeDataset blobs(std::size_t rows, std::size_t d, std::size_t informative, double gap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  LabeledNodeDataset data;
  for (std::size_t f = 0; f < d; ++f) data.feature_names.push_back("f" + std::to_string(f));
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = static_cast<int>(r % 2);
    for (std::size_t f = 0; f < d; ++f)
      data.features.push_back(noise(rng) + (f < informative ? gap * (label == 0 ? -1.0 : 1.0) : 0.0));
    data.labels.push_back(label);
    data.network_ids.push_back(0);
  }
  return data;
}

double accuracy(const ForestModel& m, const LabeledNodeDataset& data) {
  const auto pred = predict_label(m, data.features);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == data.labels[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("separable 1-D data is learned exactly") {
  LabeledNodeDataset data;
  data.feature_names = {"x"};
  for (int i = 0; i < 100; ++i) {
    const double x = (i % 2 == 0 ? -1.0 : 1.0) * (1.0 + i);
    data.features.push_back(x);
    data.labels.push_back(x < 0 ? 0 : 1);
    data.network_ids.push_back(0);
  }
  TrainConfig cfg;
  cfg.seed = 1;
  const auto m = train_forest(data, cfg);
  CHECK(accuracy(m, data) == 1.0);
  const std::vector<double> deep{-50.0};
  CHECK(predict_proba(m, deep)[0] >= 0.95);
}

TEST_CASE("separable blobs generalize") {
  const auto train = blobs(400, 4, 2, 3.0, 1);
  const auto test = blobs(400, 4, 2, 3.0, 2);
  TrainConfig cfg;
  cfg.seed = 3;
  CHECK(accuracy(train_forest(train, cfg), test) >= 0.98);
}

TEST_CASE("probabilities are vote fractions and rows sum to one") {
  const auto data = blobs(300, 3, 1, 0.5, 4);
  TrainConfig cfg;
  cfg.num_trees = 37;
  cfg.seed = 5;
  const auto m = train_forest(data, cfg);
  const auto p = predict_proba(m, data.features);
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    const double s = p[2 * r] + p[2 * r + 1];
    CHECK(std::abs(s - 1.0) < 1e-12);
    CHECK(p[2 * r] >= 0.0);
    CHECK(std::abs(p[2 * r] * 37.0 - std::round(p[2 * r] * 37.0)) < 1e-9);
  }
  cfg.num_trees = 1;
  const auto single = predict_proba(train_forest(data, cfg), data.features);
  for (double x : single) CHECK((x == 0.0 || x == 1.0));
  CHECK_THROWS(predict_proba(m, std::vector<double>{1.0, 2.0}));
}

TEST_CASE("tie rule") {
  CHECK(argmax_class(std::vector<double>{0.7, 0.3}) == 0);
  CHECK(argmax_class(std::vector<double>{0.5, 0.5}) == 0);
  CHECK(argmax_class(std::vector<double>{0.2, 0.4, 0.4}) == 1);
}

TEST_CASE("training rows replay their own label with one unpruned tree") {
  // Each distinct point appears 30 times, so the bootstrap sees all of them.
  LabeledNodeDataset data;
  data.feature_names = {"a", "b"};
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 2>> points(10);
  for (auto& pt : points) pt = {u(rng), u(rng)};
  for (int rep = 0; rep < 30; ++rep)
    for (std::size_t i = 0; i < points.size(); ++i) {
      data.features.insert(data.features.end(), points[i].begin(), points[i].end());
      data.labels.push_back(static_cast<int>(i % 3));
      data.network_ids.push_back(0);
    }
  TrainConfig cfg;
  cfg.num_trees = 1;
  cfg.seed = 7;
  const auto m = train_forest(data, cfg);
  const auto p = predict_proba(m, data.features);
  for (std::size_t r = 0; r < data.num_rows(); ++r) CHECK(p[r * 3 + static_cast<std::size_t>(data.labels[r])] == 1.0);
}

TEST_CASE("importances") {
  auto data = blobs(500, 3, 1, 2.0, 8);
  // Column 2 becomes constant.
  for (std::size_t r = 0; r < data.num_rows(); ++r) data.features[r * 3 + 2] = 4.0;
  TrainConfig cfg;
  cfg.seed = 9;
  const auto m = train_forest(data, cfg);
  CHECK(m.importances[2] == 0.0);
  const auto named = feature_importances(m);
  double sum = 0;
  for (const auto& n : named) sum += n.percent;
  CHECK(sum == doctest::Approx(100.0));
  CHECK(named[0].name == "f0");
  CHECK(named[0].percent > named[1].percent);
}

TEST_CASE("a duplicated informative column shares its importance") {
  const auto base = blobs(600, 3, 1, 1.0, 10);
  LabeledNodeDataset dup = base;
  dup.feature_names.push_back("f0copy");
  dup.features.clear();
  for (std::size_t r = 0; r < base.num_rows(); ++r) {
    const auto row = base.row(r);
    dup.features.insert(dup.features.end(), row.begin(), row.end());
    dup.features.push_back(row[0]);
  }
  TrainConfig cfg;
  cfg.seed = 11;
  cfg.max_features = 2;
  const double control = train_forest(base, cfg).importances[0];
  const auto m = train_forest(dup, cfg);
  CHECK(std::abs(m.importances[0] + m.importances[3] - control) <= 0.1);
}

TEST_CASE("determinism, including across worker counts") {
  const auto data = blobs(400, 5, 2, 0.7, 12);
  TrainConfig cfg;
  cfg.seed = 13;
  set_max_jobs(1);
  const auto a = train_forest(data, cfg);
  const auto pa = predict_proba(a, data.features);
  set_max_jobs(4);
  const auto b = train_forest(data, cfg);
  const auto pb = predict_proba(b, data.features);
  set_max_jobs(1);
  CHECK(forest_to_json(a) == forest_to_json(b));
  CHECK(pa == pb);
  cfg.seed = 14;
  CHECK(forest_to_json(train_forest(data, cfg)) != forest_to_json(a));
}

TEST_CASE("strictly increasing transforms leave predictions unchanged") {
  const auto data = blobs(300, 3, 2, 0.8, 15);
  TrainConfig cfg;
  cfg.seed = 16;
  const auto before = predict_label(train_forest(data, cfg), data.features);
  const std::vector<std::function<double(double)>> transforms{
      [](double x) { return std::exp(x); }, [](double x) { return x * x * x + 5.0 * x; },
      [](double x) { return std::atan(x); }};
  for (const auto& tf : transforms)
    for (std::size_t col = 0; col < 3; ++col) {
      auto t = data;
      for (std::size_t r = 0; r < t.num_rows(); ++r) t.features[r * 3 + col] = tf(t.features[r * 3 + col]);
      CHECK(predict_label(train_forest(t, cfg), t.features) == before);
    }
}

TEST_CASE("out-of-bag fraction is close to 1/e") {
  TrainConfig cfg;
  cfg.seed = 17;
  for (double f : out_of_bag_fractions(1000, cfg)) CHECK(std::abs(f - std::exp(-1.0)) < 0.05);
}

TEST_CASE("limits: depth, min_leaf, feature sampling") {
  const auto data = blobs(200, 4, 2, 0.3, 18);
  TrainConfig cfg;
  cfg.seed = 19;
  cfg.max_depth = 2;
  cfg.min_leaf = 5;
  const auto m = train_forest(data, cfg);
  for (const auto& tree : m.trees) {
    CHECK(tree.nodes.size() <= 7);
    for (const auto& node : tree.nodes)
      if (node.is_leaf()) CHECK(std::accumulate(node.counts.begin(), node.counts.end(), 0u) >= 5u);
  }
  CHECK(TrainConfig{}.resolved_max_features(7) == 3);
  CHECK(TrainConfig{}.resolved_max_features(1) == 1);
}

TEST_CASE("training errors") {
  TrainConfig cfg;
  LabeledNodeDataset empty;
  empty.feature_names = {"x"};
  CHECK_THROWS(train_forest(empty, cfg));
  auto one_class = blobs(10, 2, 1, 1.0, 20);
  for (auto& l : one_class.labels) l = 1;
  CHECK_THROWS(train_forest(one_class, cfg));
  auto nan = blobs(10, 2, 1, 1.0, 21);
  nan.features[3] = std::nan("");
  CHECK_THROWS(train_forest(nan, cfg));
  cfg.max_features = 3;
  CHECK_THROWS(train_forest(blobs(10, 2, 1, 1.0, 22), cfg));
}

TEST_CASE("JSON round trip") {
  const auto data = blobs(200, 3, 2, 1.0, 23);
  TrainConfig cfg;
  cfg.seed = 24;
  cfg.num_trees = 10;
  cfg.max_depth = 6;
  const auto m = train_forest(data, cfg);
  const auto text = forest_to_json(m);
  const auto back = forest_from_json(text);
  CHECK(forest_to_json(back) == text);
  CHECK(predict_proba(back, data.features) == predict_proba(m, data.features));
  CHECK(text.find("\"version\"") != std::string::npos);
  auto bumped = text;
  bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 9");
  CHECK_THROWS(forest_from_json(bumped));
}
