#include <algorithm>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nodeclass/graph.hpp"
#include "oracles.hpp"

using namespace nodeclass;

TEST_CASE("from_edges drops loops and duplicates") {
  BuildSummary s;
  const std::vector<Edge> edges{{0, 1}, {1, 0}, {2, 2}, {1, 2}, {0, 1}};
  const Graph g = Graph::from_edges(3, edges, &s);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(s.self_loops == 1);
  CHECK(s.duplicates == 2);
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("from_edges rejects out-of-range ids") {
  const std::vector<Edge> edges{{0, 5}};
  CHECK_THROWS(Graph::from_edges(3, edges));
}

TEST_CASE("random graphs are simple and degree sums match") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const Graph g = oracle::random_graph(20, 0.3, rng);
    CHECK(oracle::is_simple(g));
    const auto deg = g.degree_sequence();
    std::size_t sum = 0;
    for (auto d : deg) sum += d;
    CHECK(sum == 2 * g.num_edges());
  }
}

TEST_CASE("ego networks") {
  SUBCASE("star center gives isolated leaves") {
    const Graph e = ego_network(fx::star(5), 0);
    CHECK(e.num_nodes() == 4);
    CHECK(e.num_edges() == 0);
  }
  SUBCASE("K4 gives a triangle") {
    for (NodeId u = 0; u < 4; ++u) CHECK(ego_network(fx::complete(4), u) == fx::complete(3));
  }
  SUBCASE("paw hub gives one edge on three nodes") {
    const Graph e = ego_network(fx::paw(), 0);
    CHECK(e.num_nodes() == 3);
    CHECK(e.num_edges() == 1);
  }
  SUBCASE("isolated ego gives the empty graph") {
    const Graph e = ego_network(fx::make(3, {{1, 2}}), 0);
    CHECK(e.num_nodes() == 0);
  }
  SUBCASE("never larger than the degree") {
    std::mt19937_64 rng(2);
    const Graph g = oracle::random_graph(30, 0.2, rng);
    for (NodeId u = 0; u < g.num_nodes(); ++u) CHECK(ego_network(g, u).num_nodes() == g.degree(u));
  }
}

TEST_CASE("graph stats on small graphs") {
  const auto k3 = graph_stats(fx::complete(3));
  CHECK(k3.avg_degree == doctest::Approx(2.0));
  CHECK(k3.density == doctest::Approx(1.0));
  CHECK(k3.transitivity == doctest::Approx(1.0));
  CHECK(k3.diameter == 1);
  CHECK(k3.connected);

  const auto p3 = graph_stats(fx::path(3));
  CHECK(p3.avg_degree == doctest::Approx(4.0 / 3.0));
  CHECK(p3.transitivity == 0.0);
  CHECK(p3.diameter == 2);

  const auto split = graph_stats(fx::make(7, {{0, 1}, {1, 2}, {2, 3}, {4, 5}}));
  CHECK_FALSE(split.connected);
  CHECK(split.diameter == 3);

  CHECK_THROWS(graph_stats(Graph{}));
}

TEST_CASE("degree sum identity and transitivity against oracle") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Graph g = oracle::random_graph(3 + t % 10, 0.4, rng);
    const auto s = graph_stats(g);
    CHECK(s.avg_degree * static_cast<double>(s.n) == doctest::Approx(2.0 * static_cast<double>(s.m)));
    CHECK(count_triangles(g) == oracle::triangles(g));
    double triples = 0;
    for (auto d : g.degree_sequence()) triples += static_cast<double>(d) * (static_cast<double>(d) - 1) / 2;
    const double expected = triples > 0 ? 3.0 * static_cast<double>(oracle::triangles(g)) / triples : 0.0;
    CHECK(s.transitivity == doctest::Approx(expected));
  }
}

TEST_CASE("components and distances") {
  const Graph g = fx::make(6, {{0, 1}, {1, 2}, {4, 5}});
  const auto [comp, count] = connected_components(g);
  CHECK(count == 3);
  CHECK(comp == std::vector<std::uint32_t>{0, 0, 0, 1, 2, 2});
  const auto d = bfs_distances(g, 0);
  CHECK(d[2] == 2);
  CHECK(d[4] == SIZE_MAX);
}

TEST_CASE("induced subgraph keeps the given order") {
  const Graph g = fx::paw();
  const std::vector<NodeId> nodes{3, 0, 1};
  const Graph s = g.induced_subgraph(nodes);
  CHECK(s.num_nodes() == 3);
  CHECK(s.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
}
