#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "translab/experiments.hpp"
#include "translab/graph.hpp"

using namespace translab;
using graph::EdgeKind;
using graph::Graph;
using graph::NodeId;

TEST_CASE("periodic lattice edge counts") {
  const auto g = graph::build_lattice_with_shortcuts(4, 2, 0.0, 1);
  CHECK(g.node_count() == 16);
  CHECK(g.edge_count() == 32);
  CHECK(g.edge_count(EdgeKind::local) == 32);
  CHECK(g.edge_count(EdgeKind::translocal) == 0);

  // degenerate periodic pair: both directions give the same edge
  const auto ring2 = graph::build_lattice_with_shortcuts(2, 1, 0.0, 1);
  CHECK(ring2.node_count() == 2);
  CHECK(ring2.edge_count() == 1);

  const auto cube = graph::build_lattice_with_shortcuts(3, 3, 0.0, 1);
  CHECK(cube.node_count() == 27);
  CHECK(cube.edge_count() == 81);  // 3 * N for a periodic 3D lattice
}

TEST_CASE("lattice construction rejects bad arguments") {
  CHECK_THROWS_AS(graph::build_lattice_with_shortcuts(1, 2, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(graph::build_lattice_with_shortcuts(4, 0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(graph::build_lattice_with_shortcuts(4, 4, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(graph::build_lattice_with_shortcuts(4, 2, 1.5, 1), std::invalid_argument);
}

TEST_CASE("shortcut count is binomial over seeds") {
  // 8x8 lattice, p = 0.1: translocal count ~ Binomial(64, 0.1)
  const int seeds = 200;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto g = graph::build_lattice_with_shortcuts(8, 2, 0.1, 7 + static_cast<unsigned>(s));
    total += static_cast<double>(g.edge_count(EdgeKind::translocal));
  }
  const double mean = total / seeds;
  const double expect = 64.0 * 0.1;
  const double sigma_mean = std::sqrt(64.0 * 0.1 * 0.9 / seeds);
  CHECK(std::abs(mean - expect) <= 3.0 * sigma_mean);
}

TEST_CASE("translocal edges never duplicate lattice adjacency") {
  const auto g = graph::build_lattice_with_shortcuts(6, 2, 0.5, 99);
  for (const auto& [key, kind] : g.edges()) {
    if (kind == EdgeKind::translocal) {
      CHECK_FALSE(g.lattice_adjacent(key.first, key.second));
    } else {
      CHECK(g.lattice_adjacent(key.first, key.second));
    }
  }
}

TEST_CASE("seeded construction is bit-reproducible") {
  const auto a = graph::build_lattice_with_shortcuts(8, 2, 0.2, 1234);
  const auto b = graph::build_lattice_with_shortcuts(8, 2, 0.2, 1234);
  CHECK(a.edges() == b.edges());
  const auto c = graph::build_erdos_renyi(50, 0.1, 5);
  const auto d = graph::build_erdos_renyi(50, 0.1, 5);
  CHECK(c.edges() == d.edges());
}

TEST_CASE("maximal cliques: complete graph, triangle with pendant, Petersen") {
  const auto k4 = graph::enumerate_max_cliques(graph::complete_graph(4), 1);
  REQUIRE(k4.size() == 1);
  CHECK(k4[0].members == std::vector<NodeId>{0, 1, 2, 3});

  Graph tri(4);
  tri.add_edge(0, 1, EdgeKind::local);
  tri.add_edge(0, 2, EdgeKind::local);
  tri.add_edge(1, 2, EdgeKind::local);
  tri.add_edge(2, 3, EdgeKind::local);
  const auto cliques = graph::enumerate_max_cliques(tri, 1);
  REQUIRE(cliques.size() == 2);
  CHECK(cliques[0].members == std::vector<NodeId>{0, 1, 2});
  CHECK(cliques[1].members == std::vector<NodeId>{2, 3});

  const auto pet = graph::enumerate_max_cliques(graph::petersen_graph(), 1);
  CHECK(pet.size() == 15);
  for (const auto& c : pet) CHECK(c.members.size() == 2);

  CHECK(graph::enumerate_max_cliques(Graph(0), 1).empty());

  // min_size filters singletons of an edgeless graph
  CHECK(graph::enumerate_max_cliques(Graph(4), 1).size() == 4);
  CHECK(graph::enumerate_max_cliques(Graph(4), 2).empty());
}

TEST_CASE("clique enumeration equals exhaustive subset enumeration") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 9);  // up to 12 nodes
    const double p = 0.15 + 0.7 * static_cast<double>(rng() % 1000) / 1000.0;
    const auto g = graph::build_erdos_renyi(static_cast<NodeId>(n), p, rng());
    const int min_size = 1 + static_cast<int>(rng() % 3);
    CAPTURE(trial);
    CHECK(graph::enumerate_max_cliques(g, min_size) == exp::brute_force_max_cliques(g, min_size));
  }
}

TEST_CASE("clique graph collapses complete graphs and splits paths") {
  for (NodeId n = 2; n <= 8; ++n) {
    const auto level = graph::clique_graph(graph::complete_graph(n), 1);
    CHECK(level.graph.node_count() == 1);
    CHECK(level.graph.edge_count() == 0);
    REQUIRE(level.lineage.size() == 1);
    CHECK(level.lineage[0].size() == n);
  }
  // K_1 collapses to itself once singleton cliques are admitted
  CHECK(graph::clique_graph(graph::complete_graph(1), 1, 1).graph.node_count() == 1);

  const auto path = graph::clique_graph(graph::path_graph(4), 1);
  CHECK(path.graph.node_count() == 3);
  CHECK(path.graph.edge_count() == 2);
  CHECK(path.lineage[0] == std::vector<NodeId>{0, 1});
  CHECK(path.lineage[1] == std::vector<NodeId>{1, 2});
  CHECK(path.lineage[2] == std::vector<NodeId>{2, 3});
  CHECK(path.graph.has_edge(0, 1));
  CHECK(path.graph.has_edge(1, 2));
  CHECK_FALSE(path.graph.has_edge(0, 2));

  const auto strict = graph::clique_graph(graph::path_graph(4), 2);
  CHECK(strict.graph.node_count() == 3);
  CHECK(strict.graph.edge_count() == 0);
}

TEST_CASE("renormalization fixed points") {
  const auto k3 = graph::renormalize(graph::complete_graph(3), 5, 1);
  CHECK(k3.status == graph::FixedPointStatus::found);
  CHECK(k3.fixed_point_level == 1);
  CHECK(k3.levels.back().graph.node_count() == 1);

  const auto c5 = graph::renormalize(graph::cycle_graph(5), 5, 1);
  CHECK(c5.status == graph::FixedPointStatus::found);
  CHECK(c5.fixed_point_level == 0);
  CHECK(c5.levels.size() <= 3);
  CHECK(c5.levels[1].graph.node_count() == 5);
  CHECK(c5.levels[1].graph.edge_count() == 5);
  CHECK(graph::graphs_isomorphic(c5.levels[0].graph, c5.levels[1].graph));

  const auto empty4 = graph::renormalize(Graph(4), 5, 1, /*min_size=*/1);
  CHECK(empty4.status == graph::FixedPointStatus::found);
  CHECK(empty4.levels[1].graph.node_count() == 4);
  CHECK(empty4.levels[1].graph.edge_count() == 0);

  // level-0 lineage is the identity
  CHECK(c5.levels[0].lineage[3] == std::vector<NodeId>{3});
}

TEST_CASE("renormalization above the isomorphism bound reports undecided") {
  // C20 maps to C20: beyond the default bound of 16 the match is a fingerprint
  const auto c20 = graph::renormalize(graph::cycle_graph(20), 4, 1);
  CHECK(c20.status == graph::FixedPointStatus::undecided);
}

TEST_CASE("connectivity of explicit node sets") {
  Graph g(5);
  g.add_edge(0, 2, EdgeKind::translocal);
  g.add_edge(1, 4, EdgeKind::translocal);
  const std::vector<NodeId> s1 = {0, 1};
  const std::vector<NodeId> s2 = {2, 3, 4};
  CHECK(graph::connectivity(g, s1, s2) == doctest::Approx(2.0 / 6.0));
  CHECK(graph::connectivity(g, s2, s1) == doctest::Approx(2.0 / 6.0));  // symmetric

  Graph full(4);
  for (NodeId u = 0; u < 2; ++u)
    for (NodeId v = 2; v < 4; ++v) full.add_edge(u, v, EdgeKind::translocal);
  CHECK(graph::connectivity(full, std::vector<NodeId>{0, 1}, std::vector<NodeId>{2, 3}) == 1.0);
  CHECK(graph::connectivity(Graph(4), std::vector<NodeId>{0}, std::vector<NodeId>{1}) == 0.0);

  CHECK_THROWS_AS(graph::connectivity(g, std::vector<NodeId>{0, 2}, std::vector<NodeId>{2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph::connectivity(g, std::vector<NodeId>{}, std::vector<NodeId>{1}),
                  std::invalid_argument);
}

TEST_CASE("connectivity stays within [0,1] on random graphs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = graph::build_erdos_renyi(30, 0.3, rng());
    std::vector<NodeId> s1, s2;
    for (NodeId u = 0; u < 10; ++u) s1.push_back(u);
    for (NodeId u = 10; u < 30; ++u) s2.push_back(u);
    const double c = graph::connectivity(g, s1, s2);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("connectivity from counts survives huge magnitudes") {
  const auto r = graph::connectivity_from_counts(1e79, 1e75, 1e75);
  CHECK(r.log10_value == doctest::Approx(-71.0).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(1e-71).epsilon(1e-12));

  CHECK(graph::connectivity_from_counts(0.0, 10.0, 10.0).value == 0.0);
  CHECK(graph::connectivity_from_counts(100.0, 10.0, 10.0).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(graph::connectivity_from_counts(101.0, 10.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(graph::connectivity_from_counts(1.0, 0.0, 10.0), std::invalid_argument);
}

TEST_CASE("spreading is exactly additive over disjoint parts") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = graph::build_erdos_renyi(60, 0.2, rng());
    std::vector<NodeId> target;
    for (NodeId u = 0; u < 10; ++u) target.push_back(u);
    std::vector<std::vector<NodeId>> parts(3);
    for (NodeId u = 10; u < 55; ++u) parts[(u - 10) % 3].push_back(u);
    const auto rep = graph::spreading_statistic(g, target, parts);
    CHECK(rep.additive);
    CHECK(rep.union_count == rep.sum_of_parts);
  }
  // empty graph: all counts zero
  const auto rep0 = graph::spreading_statistic(Graph(50), std::vector<NodeId>{0, 1},
                                               {{10, 11}, {12, 13}});
  CHECK(rep0.union_count == 0);
  CHECK(rep0.additive);
}

TEST_CASE("spreading per-part counts follow the binomial mean") {
  // G(200, 0.05), target of 20, 4 parts of 20: each part ~ Binomial(400, 0.05)
  const int seeds = 100;
  std::vector<double> part_mean(4, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto g = graph::build_erdos_renyi(200, 0.05, 1000 + static_cast<unsigned>(s));
    std::vector<NodeId> target;
    std::vector<std::vector<NodeId>> parts(4);
    for (NodeId u = 0; u < 20; ++u) target.push_back(u);
    for (int p = 0; p < 4; ++p)
      for (NodeId u = 0; u < 20; ++u)
        parts[static_cast<std::size_t>(p)].push_back(20 + static_cast<NodeId>(p) * 20 + u);
    const auto rep = graph::spreading_statistic(g, target, parts);
    for (int p = 0; p < 4; ++p)
      part_mean[static_cast<std::size_t>(p)] +=
          static_cast<double>(rep.part_counts[static_cast<std::size_t>(p)]);
  }
  const double expect = 400.0 * 0.05;
  const double sigma_mean = std::sqrt(400.0 * 0.05 * 0.95 / seeds);
  for (const double m : part_mean)
    CHECK(std::abs(m / seeds - expect) <= 4.0 * sigma_mean);
}

TEST_CASE("spreading rejects overlapping inputs") {
  const auto g = graph::build_erdos_renyi(20, 0.3, 3);
  CHECK_THROWS_AS(graph::spreading_statistic(g, std::vector<NodeId>{0, 1}, {{1, 2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph::spreading_statistic(g, std::vector<NodeId>{0}, {{2, 3}, {3, 4}}),
                  std::invalid_argument);
}

TEST_CASE("rewire step preserves local edges and node count") {
  const auto g = graph::build_lattice_with_shortcuts(6, 2, 0.4, 17);
  std::vector<double> phases(g.node_count());
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
  for (auto& p : phases) p = uni(rng);

  SUBCASE("toggle_prob zero leaves the graph unchanged") {
    const auto out = graph::rewire_step(g, phases, 1.0, 0.0, 5);
    CHECK(out.edges() == g.edges());
  }
  SUBCASE("equal phases produce no removals") {
    std::vector<double> flat(g.node_count(), 1.0);
    const auto out = graph::rewire_step(g, flat, std::numbers::pi, 1.0, 5);
    CHECK(out.edges() == g.edges());
  }
  SUBCASE("local edges and node count survive aggressive rewiring") {
    const auto out = graph::rewire_step(g, phases, 0.5, 1.0, 5);
    CHECK(out.node_count() == g.node_count());
    for (const auto& [key, kind] : g.edges())
      if (kind == EdgeKind::local) CHECK(out.edge_kind(key.first, key.second) == EdgeKind::local);
    for (const auto& [key, kind] : out.edges())
      if (kind == EdgeKind::translocal) CHECK_FALSE(out.lattice_adjacent(key.first, key.second));
  }
  SUBCASE("deterministic per seed") {
    const auto a = graph::rewire_step(g, phases, 0.5, 0.7, 5);
    const auto b = graph::rewire_step(g, phases, 0.5, 0.7, 5);
    CHECK(a.edges() == b.edges());
  }
  SUBCASE("threshold validation") {
    CHECK_THROWS_AS(graph::rewire_step(g, phases, 0.0, 0.5, 5), std::invalid_argument);
    CHECK_THROWS_AS(graph::rewire_step(g, phases, 4.0, 0.5, 5), std::invalid_argument);
  }
}

TEST_CASE("two-cluster rewiring removes all cross-cluster translocal edges") {
  // clusters at phase 0 and pi; threshold pi/2; every candidate toggles
  Graph g(12);
  g.set_lattice(12, 1);
  for (NodeId u = 0; u < 12; ++u) g.add_edge(u, (u + 1) % 12, EdgeKind::local);
  g.add_edge(0, 6, EdgeKind::translocal);
  g.add_edge(1, 7, EdgeKind::translocal);
  g.add_edge(2, 4, EdgeKind::translocal);  // within the first cluster
  std::vector<double> phases(12, 0.0);
  for (NodeId u = 6; u < 12; ++u) phases[u] = std::numbers::pi;

  const auto out = graph::rewire_step(g, phases, std::numbers::pi / 2.0, 1.0, 31);
  for (const auto& [key, kind] : out.edges()) {
    if (kind != EdgeKind::translocal) continue;
    const double d = std::abs(phases[key.first] - phases[key.second]);
    CHECK(d < std::numbers::pi / 2.0);
  }
  CHECK(out.edge_kind(2, 4) == EdgeKind::translocal);
  CHECK_FALSE(out.has_edge(0, 6));
  CHECK_FALSE(out.has_edge(1, 7));
}

TEST_CASE("graph file format round-trips bit-exactly") {
  const auto g = graph::build_lattice_with_shortcuts(5, 2, 0.3, 77);
  std::ostringstream first;
  graph::write_graph(g, first);
  std::istringstream in(first.str());
  const auto back = graph::read_graph(in);
  std::ostringstream second;
  graph::write_graph(back, second);
  CHECK(first.str() == second.str());
  CHECK(back.edges() == g.edges());
  CHECK(back.node_count() == g.node_count());
}

TEST_CASE("graph file format rejects malformed input") {
  std::istringstream bad_header("vertices=4\n0 1 L\n");
  CHECK_THROWS(graph::read_graph(bad_header));
  std::istringstream bad_kind("nodes=4\n0 1 X\n");
  CHECK_THROWS(graph::read_graph(bad_kind));
  std::istringstream dup("nodes=4\n0 1 L\n1 0 T\n");
  CHECK_THROWS(graph::read_graph(dup));
}

TEST_CASE("isomorphism test on relabeled graphs") {
  CHECK(graph::graphs_isomorphic(graph::cycle_graph(5), graph::cycle_graph(5)));
  CHECK_FALSE(graph::graphs_isomorphic(graph::cycle_graph(5), graph::path_graph(5)));
  CHECK_FALSE(graph::graphs_isomorphic(graph::cycle_graph(6), graph::cycle_graph(5)));

  // random relabeling of the Petersen graph
  std::mt19937_64 rng(13);
  std::vector<NodeId> perm(10);
  for (NodeId u = 0; u < 10; ++u) perm[u] = u;
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto pet = graph::petersen_graph();
  Graph relabeled(10);
  for (const auto& [key, kind] : pet.edges())
    relabeled.add_edge(perm[key.first], perm[key.second], kind);
  CHECK(graph::graphs_isomorphic(pet, relabeled));

  // same degree sequence, different structure: C6 vs two triangles
  Graph two_triangles(6);
  for (NodeId base : {0u, 3u})
    for (NodeId i = 0; i < 3; ++i)
      two_triangles.add_edge(base + i, base + (i + 1) % 3, EdgeKind::local);
  CHECK_FALSE(graph::graphs_isomorphic(graph::cycle_graph(6), two_triangles));
}

TEST_CASE("graph rejects self-loops and out-of-range endpoints") {
  Graph g(3);
  CHECK_THROWS_AS(g.add_edge(1, 1, EdgeKind::local), std::invalid_argument);
  CHECK_THROWS_AS(g.add_edge(0, 3, EdgeKind::local), std::invalid_argument);
  CHECK(g.add_edge(0, 1, EdgeKind::local));
  CHECK_FALSE(g.add_edge(1, 0, EdgeKind::translocal));  // duplicate
}
