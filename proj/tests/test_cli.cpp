#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "nodeclass/models.hpp"

namespace fs = std::filesystem;
using nodeclass::gen_er;
using nodeclass::gen_holme_kim;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(NODECLASS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

struct Workspace {
  fs::path dir = fx::temp_dir("cli");
  fs::path er = dir / "er.edges";
  fs::path hk = dir / "hk.edges";

  Workspace() {
    fx::write_edges(er, gen_er(120, 360, 1));
    fx::write_edges(hk, gen_holme_kim(120, 360, 1.0, 2));
    std::vector<nodeclass::Graph> graphs;
    std::vector<int> labels;
    for (std::uint64_t s = 0; s < 8; ++s) {
      graphs.push_back(gen_er(30, 60, s));
      labels.push_back(1);
      graphs.push_back(gen_holme_kim(30, 60, 1.0, s));
      labels.push_back(2);
    }
    fs::create_directories(dir / "data" / "TOY");
    fx::write_tu(dir / "data" / "TOY", "TOY", graphs, labels);
  }

  std::string out(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("features subcommand") {
  Workspace ws;
  REQUIRE(run("features -i " + ws.er.string() + " --seed 1 -o " + ws.out("f")) == 0);
  const auto csv = fx::read(ws.dir / "f" / "features.csv");
  CHECK(csv.rfind("node_id,degree,clustering,betweenness,eigenvector,closeness,coreness,link_diversity\n", 0) == 0);
  CHECK(count_lines(csv) == 121);

  REQUIRE(run("features -i " + ws.er.string() + " --lightweight --seed 1 -o " + ws.out("fl")) == 0);
  const auto light = fx::read(ws.dir / "fl" / "features.csv");
  const auto header = light.substr(0, light.find('\n'));
  CHECK(std::count(header.begin(), header.end(), ',') == 5);

  const auto manifest = nlohmann::json::parse(fx::read(ws.dir / "f" / "manifest.json"));
  CHECK(manifest.at("subcommand") == "features");
  CHECK(manifest.at("seed") == 1);
  CHECK(manifest.at("outputs").size() == 2);
}

TEST_CASE("exit codes") {
  Workspace ws;
  CHECK(run("--help") == 0);
  CHECK(run("features --bogus") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("features -i " + ws.out("missing.edges") + " -o " + ws.out("x")) == 2);
  CHECK(run("node-cv -i " + ws.er.string() + " -i " + ws.hk.string() + " --folds 1 -o " + ws.out("x")) == 1);
  CHECK(run("network-cv --dataset NOPE --data-dir " + ws.out("data") + " -o " + ws.out("x")) == 2);
  fx::write(ws.dir / "bad.edges", "0 1\n1 two\n");
  CHECK(run("stats -i " + ws.out("bad.edges") + " -o " + ws.out("x")) == 2);
}

TEST_CASE("generate and stats") {
  Workspace ws;
  REQUIRE(run("generate --model holme-kim --n 200 --m 600 --count 2 --seed 3 -o " + ws.out("g")) == 0);
  CHECK(fs::exists(ws.dir / "g" / "holmekim_0000.edges"));
  CHECK(fs::exists(ws.dir / "g" / "holmekim_0001.edges"));
  REQUIRE(run("generate --model configuration --like " + ws.er.string() + " --seed 3 -o " + ws.out("c")) == 0);
  REQUIRE(run("stats -i " + ws.out("g/holmekim_0000.edges") + " -o " + ws.out("s")) == 0);
  const auto stats = nlohmann::json::parse(fx::read(ws.dir / "s" / "stats.json"));
  // Seed clique of 4 plus 3 edges for each of the other 196 nodes.
  CHECK(stats.at(0).at("n") == 200);
  CHECK(stats.at(0).at("m") == 594);
}

TEST_CASE("experiment subcommands") {
  Workspace ws;
  const std::string common = " --folds 2 --repeats 1 --trees 10 --seed 4 ";
  REQUIRE(run("node-cv -i " + ws.er.string() + " -i " + ws.hk.string() + common + "-o " + ws.out("n")) == 0);
  const auto report = nlohmann::json::parse(fx::read(ws.dir / "n" / "report.json"));
  CHECK(report.at("per_fold").size() == 2);
  CHECK(report.at("accuracy_mean").get<double>() > 80.0);

  const std::string data = " --dataset TOY --data-dir " + ws.out("data");
  CHECK(run("network-cv" + data + common + "-o " + ws.out("net")) == 0);
  CHECK(run("baseline" + data + common + "-o " + ws.out("base")) == 0);
  CHECK(run("classify-networks" + data + " -p 0.1 -p 1" + common + "-o " + ws.out("cls")) == 0);
  CHECK(count_lines(fx::read(ws.dir / "cls" / "accuracy_by_fraction.csv")) == 3);
  CHECK(run("real-vs-model --model er" + data + common + "-o " + ws.out("rvm")) == 0);
  CHECK(run("train -i " + ws.er.string() + " -i " + ws.hk.string() + " --trees 5 --seed 1 -o " + ws.out("t")) == 0);
  CHECK(fx::read(ws.dir / "t" / "model.json").find("nodeclass-random-forest") != std::string::npos);
}

TEST_CASE("bootstrap subcommand") {
  Workspace ws;
  fx::write_edges(ws.dir / "orig.edges", gen_holme_kim(200, 800, 1.0, 5));
  REQUIRE(run("bootstrap --original " + ws.out("orig.edges") +
              " --attachment tc --threshold 0 --lightweight --trees 5 --seed 2 --snapshot-every 5 -o " +
              ws.out("b")) == 0);
  const auto trace = fx::read(ws.dir / "b" / "trace.csv");
  CHECK(trace.rfind("iteration,n_before,added,pruned,n_after,mean_score\n", 0) == 0);
  CHECK(fs::exists(ws.dir / "b" / "grown.edges"));
  CHECK(fs::exists(ws.dir / "b" / "snapshots" / "iter_0005.edges"));
  const auto summary = nlohmann::json::parse(fx::read(ws.dir / "b" / "summary.json"));
  CHECK(summary.dump().find("reached_target") != std::string::npos);
}

TEST_CASE("outputs do not depend on the worker count") {
  Workspace ws;
  const std::string args = "node-cv -i " + ws.er.string() + " -i " + ws.hk.string() +
                           " --folds 3 --repeats 2 --trees 20 --seed 9 -o ";
  REQUIRE(run(args + ws.out("j1") + " --jobs 1") == 0);
  REQUIRE(run(args + ws.out("j8") + " --jobs 8") == 0);
  for (const char* f : {"report.json", "folds.csv", "importance.csv", "node_scores.csv", "manifest.json"})
    CHECK_MESSAGE(fx::read(ws.dir / "j1" / f) == fx::read(ws.dir / "j8" / f), f);
}
