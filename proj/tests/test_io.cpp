#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nodeclass/errors.hpp"
#include "nodeclass/io.hpp"
#include "oracles.hpp"

using namespace nodeclass;

TEST_CASE("edge list: two-edge path") {
  const auto dir = fx::temp_dir("io_path");
  fx::write(dir / "g.edges", "0 1\n1 2\n");
  const auto lg = load_edge_list(dir / "g.edges");
  CHECK(lg.graph.num_nodes() == 3);
  CHECK(lg.graph.num_edges() == 2);
  CHECK(lg.summary.dropped() == 0);
}

TEST_CASE("edge list: one-indexed with duplicates and a loop") {
  const auto dir = fx::temp_dir("io_dedup");
  fx::write(dir / "g.edges", "1 2\n2 1\n1 1\n");
  const auto lg = load_edge_list(dir / "g.edges", true);
  CHECK(lg.graph.num_nodes() == 2);
  CHECK(lg.graph.num_edges() == 1);
  CHECK(lg.summary.dropped() == 2);
  CHECK(lg.original_ids == std::vector<std::int64_t>{0, 1});
}

TEST_CASE("edge list: relabels in first-appearance order, skips comments") {
  const auto dir = fx::temp_dir("io_relabel");
  fx::write(dir / "g.edges", "# a comment\n10 7\n\n7 3\n");
  const auto lg = load_edge_list(dir / "g.edges");
  CHECK(lg.original_ids == std::vector<std::int64_t>{10, 7, 3});
  CHECK(lg.graph.has_edge(0, 1));
  CHECK(lg.graph.has_edge(1, 2));
}

TEST_CASE("edge list errors") {
  const auto dir = fx::temp_dir("io_errors");
  fx::write(dir / "bad.edges", "0 1\n1 x\n");
  try {
    load_edge_list(dir / "bad.edges");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  fx::write(dir / "three.edges", "0 1 2\n");
  CHECK_THROWS_AS(load_edge_list(dir / "three.edges"), ParseError);
  fx::write(dir / "empty.edges", "# nothing\n");
  CHECK_THROWS_AS(load_edge_list(dir / "empty.edges"), DataError);
  CHECK_THROWS_AS(load_edge_list(dir / "missing.edges"), IoError);
}

TEST_CASE("export round-trips, including isolated nodes") {
  const auto dir = fx::temp_dir("io_roundtrip");
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Graph g = oracle::random_graph(15, 0.15, rng);
    export_graph(g, {}, dir / "g.edges");
    CHECK(load_edge_list(dir / "g.edges").graph == g);
    CHECK_FALSE(std::filesystem::exists(score_csv_path(dir / "g.edges")));
  }
}

TEST_CASE("export with scores writes a companion CSV") {
  const auto dir = fx::temp_dir("io_scores");
  const std::vector<double> scores{0.1, 0.9, 0.5};
  export_graph(fx::path(3), scores, dir / "p3.edges");
  const auto text = fx::read(dir / "p3.edges");
  std::size_t edge_lines = 0;
  for (std::size_t i = 0, j; i < text.size(); i = j + 1) {
    j = text.find('\n', i);
    if (text[i] != '#') ++edge_lines;
  }
  CHECK(edge_lines == 2);
  CHECK(fx::read(score_csv_path(dir / "p3.edges")) == "node_id,score\n0,0.1\n1,0.9\n2,0.5\n");
  CHECK_THROWS_AS(export_graph(fx::path(3), std::vector<double>{1.0}, dir / "x.edges"), std::invalid_argument);
}

TEST_CASE("TU loader on a two-graph fixture") {
  const auto dir = fx::temp_dir("io_tu");
  // Graph 1: triangle on nodes 1-3; graph 2: edge 4-5. Each edge in both directions.
  fx::write(dir / "FX_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n");
  fx::write(dir / "FX_graph_indicator.txt", "1\n1\n1\n2\n2\n");
  fx::write(dir / "FX_graph_labels.txt", "5\n-1\n");
  const auto col = load_tu_dataset(dir, "FX");
  REQUIRE(col.size() == 2);
  CHECK(col.graphs[0].num_nodes() == 3);
  CHECK(col.graphs[0].num_edges() == 3);
  CHECK(col.graphs[1].num_nodes() == 2);
  CHECK(col.graphs[1].num_edges() == 1);
  CHECK(col.labels == std::vector<int>{1, 0});
  CHECK(col.class_names == std::vector<std::string>{"-1", "5"});
  CHECK(col.origin_ids.size() == 2);
}

TEST_CASE("TU loader rejects edges across graphs and missing files") {
  const auto dir = fx::temp_dir("io_tu_bad");
  fx::write(dir / "FX_A.txt", "1, 2\n2, 1\n2, 3\n3, 2\n");
  fx::write(dir / "FX_graph_indicator.txt", "1\n1\n2\n");
  fx::write(dir / "FX_graph_labels.txt", "0\n1\n");
  CHECK_THROWS_AS(load_tu_dataset(dir, "FX"), FormatError);
  CHECK_THROWS_AS(load_tu_dataset(dir, "NOPE"), IoError);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12345.678}) CHECK(std::stod(format_double(x)) == x);
}
