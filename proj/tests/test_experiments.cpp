#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "nodeclass/experiments.hpp"
#include "nodeclass/models.hpp"
#include "nodeclass/parallel.hpp"

using namespace nodeclass;

namespace {

ExperimentConfig quick(std::size_t folds, std::size_t repeats, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.folds = folds;
  cfg.repeats = repeats;
  cfg.seed = seed;
  cfg.forest.num_trees = 30;
  return cfg;
}

void check_report_invariants(const CvReport& r) {
  CHECK(r.per_fold.size() == r.config.folds * r.config.repeats);
  double sum = 0;
  for (const auto& f : r.per_fold) sum += f.accuracy;
  CHECK(std::abs(r.accuracy_mean - sum / static_cast<double>(r.per_fold.size())) < 1e-9);
  CHECK(r.accuracy_mean >= 0.0);
  CHECK(r.accuracy_mean <= 100.0);
}

GraphCollection collection(const std::vector<Graph>& a, const std::vector<Graph>& b) {
  GraphCollection c;
  for (const auto& g : a) {
    c.graphs.push_back(g);
    c.labels.push_back(0);
  }
  for (const auto& g : b) {
    c.graphs.push_back(g);
    c.labels.push_back(1);
  }
  for (std::size_t i = 0; i < c.size(); ++i) c.origin_ids.push_back("g" + std::to_string(i));
  c.class_names = {"a", "b"};
  return c;
}

}  // namespace

TEST_CASE("build_node_dataset") {
  const Graph k3 = fx::complete(3), p3 = fx::path(3), empty;
  std::vector<NodeSource> src{{k3, 0, 0}, {p3, 1, 1}};
  const auto data = build_node_dataset(src, false, 1);
  CHECK(data.num_rows() == 6);
  CHECK(data.labels == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(data.network_ids == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(data.num_features() == 7);
  CHECK(build_node_dataset(src, true, 1).num_features() == 5);
  std::vector<std::string> flags;
  src.push_back({empty, 1, 2});
  CHECK(build_node_dataset(src, false, 1, &flags).num_rows() == 6);
  CHECK(flags.size() == 1);
}

TEST_CASE("stratified folds") {
  std::vector<int> labels;
  for (int i = 0; i < 53; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto folds = stratified_folds(labels, 5, seed);
    REQUIRE(folds.size() == labels.size());
    std::map<std::pair<int, std::size_t>, int> per;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      CHECK(folds[i] < 5);
      ++per[{labels[i], folds[i]}];
    }
    // Within each class, fold sizes differ by at most one.
    for (int c = 0; c < 2; ++c) {
      int lo = 1 << 30, hi = 0;
      for (std::size_t f = 0; f < 5; ++f) {
        lo = std::min(lo, per[{c, f}]);
        hi = std::max(hi, per[{c, f}]);
      }
      CHECK(hi - lo <= 1);
    }
  }
  // Units with the same rank in equal-size classes share a fold.
  const std::vector<int> twins{0, 0, 0, 0, 1, 1, 1, 1};
  const auto f = stratified_folds(twins, 2, 3);
  for (std::size_t i = 0; i < 4; ++i) CHECK(f[i] == f[i + 4]);
  CHECK(stratified_folds(twins, 2, 3) != stratified_folds(twins, 2, 4));
}

TEST_CASE("node CV: identical copies give chance, distinct models separate") {
  const Graph g = gen_holme_kim(300, 900, 0.5, 1);
  const std::vector<Graph> same{g, g};
  const auto r = kfold_node_cv(same, quick(5, 2, 2));
  check_report_invariants(r);
  CHECK(r.accuracy_mean == doctest::Approx(50.0).epsilon(0.03));
  CHECK(r.class_rows == std::vector<std::size_t>{300, 300});

  const std::vector<Graph> two{gen_er(500, 1500, 3), gen_ba(500, 1500, 4)};
  const auto s = kfold_node_cv(two, quick(5, 1, 5));
  CHECK(s.accuracy_mean >= 90.0);
  CHECK(s.node_scores.size() == 1000);
  CHECK_THROWS(kfold_node_cv(std::vector<Graph>{fx::path(3), fx::path(3)}, quick(5, 1, 1)));
}

TEST_CASE("network CV") {
  std::vector<Graph> a, b;
  for (std::uint64_t s = 0; s < 10; ++s) {
    a.push_back(gen_er(40, 100, s));
    b.push_back(gen_er(40, 100, 100 + s));
  }
  const auto same = kfold_network_cv(collection(a, b), quick(5, 2, 1));
  check_report_invariants(same);
  CHECK(std::abs(same.accuracy_mean - 50.0) <= 5.0);

  std::vector<Graph> hk;
  for (std::uint64_t s = 0; s < 10; ++s) hk.push_back(gen_holme_kim(40, 120, 1.0, s));
  const auto sep = kfold_network_cv(collection(a, hk), quick(5, 1, 2));
  CHECK(sep.accuracy_mean > 85.0);
  CHECK(sep.importance_mean.size() == 7);
  CHECK(std::accumulate(sep.importance_mean.begin(), sep.importance_mean.end(), 0.0) == doctest::Approx(100.0));

  std::vector<Graph> few(a.begin(), a.begin() + 3);
  CHECK_THROWS(kfold_network_cv(collection(few, b), quick(5, 1, 1)));
}

TEST_CASE("real vs model") {
  std::vector<Graph> ws;
  for (std::uint64_t s = 0; s < 20; ++s) ws.push_back(gen_ws(100, 300, 0.1, s));
  const auto r = real_vs_model_experiment(ws, ModelKind::kEr, quick(5, 1, 1));
  check_report_invariants(r);
  CHECK(r.accuracy_mean >= 90.0);
  CHECK(r.generated.size() == 20);
  CHECK(r.class_names == std::vector<std::string>{"real", "ER"});
  for (const auto& g : r.generated) CHECK(g.m == g.target_m);
  CHECK_THROWS(real_vs_model_experiment(std::vector<Graph>{}, ModelKind::kEr, quick(5, 1, 1)));
}

TEST_CASE("real vs model flags generator failures") {
  // WS needs lattice degree below n, which fails for these dense graphs.
  std::vector<Graph> reals;
  for (std::uint64_t s = 0; s < 4; ++s) reals.push_back(gen_er(6, 15, s));
  for (std::uint64_t s = 0; s < 4; ++s) reals.push_back(gen_er(30, 40, s));
  auto cfg = quick(2, 1, 3);
  const auto r = real_vs_model_experiment(reals, ModelKind::kWs, cfg);
  CHECK(r.flags.size() == 4);
  CHECK(r.generated.size() == 4);
}

TEST_CASE("whole-network classification") {
  // Vertex-transitive graphs: every node of a network gets the same features,
  // so any sample size must agree with the single-node prediction.
  std::vector<Graph> cliques, cycles;
  for (std::size_t n = 6; n < 12; ++n) {
    cliques.push_back(fx::complete(n));
    std::vector<Edge> e;
    for (NodeId u = 0; u < n; ++u) e.emplace_back(u, static_cast<NodeId>((u + 1) % n));
    cycles.push_back(Graph::from_edges(n, e));
  }
  const std::vector<double> fractions{0.01, 0.5, 1.0};
  const auto reports = whole_network_classify(collection(cliques, cycles), quick(3, 2, 1), fractions);
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) {
    check_report_invariants(r);
    CHECK(r.accuracy_mean == 100.0);
  }
  // The training procedure does not depend on p.
  for (std::size_t j = 0; j < reports[0].per_fold.size(); ++j) {
    CHECK(reports[0].per_fold[j].forest_seed == reports[2].per_fold[j].forest_seed);
    CHECK(reports[0].per_fold[j].train_rows == reports[2].per_fold[j].train_rows);
  }
  CHECK(reports[1].config.sample_fraction == 0.5);

  std::vector<Graph> a, hk;
  for (std::uint64_t s = 0; s < 6; ++s) {
    a.push_back(gen_er(60, 180, s));
    hk.push_back(gen_holme_kim(60, 180, 1.0, s));
  }
  auto cfg = quick(3, 1, 2);
  cfg.sample_fraction = 1.0;
  CHECK(whole_network_classify(collection(a, hk), cfg).accuracy_mean == 100.0);
  const std::vector<double> bad{0.0};
  CHECK_THROWS(whole_network_classify(collection(a, hk), cfg, bad));
}

TEST_CASE("whole-network classification counts empty networks as misclassified") {
  std::vector<Graph> a, b;
  for (std::uint64_t s = 0; s < 4; ++s) {
    a.push_back(gen_er(30, 60, s));
    b.push_back(gen_holme_kim(30, 60, 1.0, s));
  }
  a.push_back(Graph{});
  b.push_back(gen_holme_kim(30, 60, 1.0, 9));
  const auto r = whole_network_classify(collection(a, b), quick(5, 1, 3));
  CHECK(r.accuracy_mean <= 90.0 + 1e-9);
  CHECK_FALSE(r.flags.empty());
}

TEST_CASE("network feature baseline") {
  std::vector<Graph> er, hk;
  for (std::uint64_t s = 0; s < 10; ++s) {
    er.push_back(gen_er(80, 240, s));
    hk.push_back(gen_holme_kim(80, 240, 1.0, s));
  }
  const auto r = feature_based_baseline(collection(er, hk), quick(5, 2, 1));
  check_report_invariants(r);
  CHECK(r.accuracy_mean >= 95.0);
  CHECK(r.feature_names == network_feature_names());

  std::vector<Graph> singles(4, fx::make(1, {}));
  std::vector<Graph> pairs(4, fx::path(2));
  const auto d = feature_based_baseline(collection(singles, pairs), quick(2, 1, 1));
  CHECK(d.flags.size() == 8);

  CHECK(degree_assortativity(fx::complete(4)) == std::nullopt);
  CHECK(degree_assortativity(fx::star(5)).value() == doctest::Approx(-1.0));
  const auto nf = network_features(fx::complete(4)).values;
  CHECK(nf == std::vector<double>{3.0, 4.0, 1.0, 0.0, 1.0, 1.0});
}

TEST_CASE("reports serialize") {
  const std::vector<Graph> two{gen_er(60, 150, 1), gen_holme_kim(60, 150, 1.0, 2)};
  auto cfg = quick(2, 2, 7);
  const auto r = kfold_node_cv(two, cfg);
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j.at("accuracy_mean").get<double>() == r.accuracy_mean);
  CHECK(j.at("per_fold").size() == 4);
  CHECK(j.at("config").at("seed").get<std::uint64_t>() == 7);
  const auto csv = folds_csv(r);
  CHECK(csv.rfind("fold,repeat,accuracy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(importance_csv(r).rfind("feature,mean,std\ndegree,", 0) == 0);
  CHECK(node_scores_csv(r).rfind("repeat,fold,network_id,label,node_id,predicted,score_0,score_1\n", 0) == 0);
}

TEST_CASE("config and model spec JSON") {
  ExperimentConfig cfg;
  cfg.mode = ExperimentMode::kRealVsModel;
  cfg.folds = 4;
  cfg.repeats = 3;
  cfg.lightweight = true;
  cfg.sample_fraction = 0.25;
  cfg.seed = 99;
  cfg.forest.num_trees = 17;
  cfg.forest.max_depth = 5;
  ModelSpec spec;
  spec.kind = ModelKind::kConfiguration;
  spec.degree_sequence = std::vector<std::size_t>{1, 1, 2};
  cfg.model_spec = spec;
  const auto back = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK(back.forest.max_depth == 5);
  CHECK(back.model_spec->degree_sequence->size() == 3);
  CHECK_THROWS(config_from_json(R"({"folds": 1})"));
  CHECK(config_from_json(R"({"mode": "node-cv", "folds": 3})").folds == 3);
  const auto s = model_spec_from_json(model_spec_to_json(spec));
  CHECK(s.kind == ModelKind::kConfiguration);
  CHECK(parse_experiment_mode("whole_network") == ExperimentMode::kWholeNetwork);
}

TEST_CASE("experiments do not depend on the worker count") {
  const std::vector<Graph> two{gen_er(150, 450, 1), gen_holme_kim(150, 450, 1.0, 2)};
  auto cfg = quick(3, 2, 11);
  set_max_jobs(1);
  const auto a = report_to_json(kfold_node_cv(two, cfg));
  set_max_jobs(4);
  const auto b = report_to_json(kfold_node_cv(two, cfg));
  set_max_jobs(1);
  CHECK(a == b);
}

TEST_CASE("ego sampling") {
  const Graph g = gen_holme_kim(500, 2000, 1.0, 3);
  const auto egos = sample_ego_networks(g, 20, 10, 4);
  CHECK(egos.size() == 20);
  for (const auto& e : egos) CHECK(e.num_nodes() >= 10);
  CHECK(sample_ego_networks(g, 100000, 10, 4).size() < 500);
}
