#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "casbr/graph.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using casbr::Graph;
using casbr::NodeId;
using casbr::RngSeed;

namespace {

void check_invariants(const Graph& g) {
  std::size_t degree_sum = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto& nbrs = g.neighbors(v);
    degree_sum += nbrs.size();
    REQUIRE(std::is_sorted(nbrs.begin(), nbrs.end()));
    REQUIRE(std::adjacent_find(nbrs.begin(), nbrs.end()) == nbrs.end());
    for (NodeId u : nbrs) {
      REQUIRE(u != v);
      REQUIRE(u < g.node_count());
      const auto& back = g.neighbors(u);
      REQUIRE(std::binary_search(back.begin(), back.end(), v));
    }
  }
  REQUIRE(degree_sum == 2 * g.edge_count());
}

}  // namespace

TEST_CASE("edge list loader handles the basic forms") {
  std::istringstream simple("0 1\n1 2");
  auto loaded = casbr::load_edge_list(simple);
  REQUIRE(loaded.graph.node_count() == 3);
  REQUIRE(loaded.graph.edge_count() == 2);

  std::istringstream dirty("0 1\n1 0\n0 0");
  auto cleaned = casbr::load_edge_list(dirty);
  REQUIRE(cleaned.graph.node_count() == 2);
  REQUIRE(cleaned.graph.edge_count() == 1);
  REQUIRE(cleaned.stats.self_loops_dropped == 1);
  REQUIRE(cleaned.stats.duplicate_edges_collapsed == 1);
}

TEST_CASE("toy network loads with the expected shape") {
  std::istringstream in(fixtures::kToyEdgeList);
  auto loaded = casbr::load_edge_list(in);
  REQUIRE(loaded.graph.node_count() == fixtures::kToyNodes);
  // Expected edge count pinned by deduplicating the fixture lines here.
  std::set<std::pair<std::string, std::string>> distinct;
  std::istringstream again(fixtures::kToyEdgeList);
  std::string line;
  while (std::getline(again, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string a, b;
    ls >> a >> b;
    distinct.emplace(std::min(a, b), std::max(a, b));
  }
  REQUIRE(distinct.size() == fixtures::kToyEdges);
  REQUIRE(loaded.graph.edge_count() == distinct.size());
  check_invariants(loaded.graph);
}

TEST_CASE("loader reports malformed lines by number") {
  std::istringstream bad("0 1\nx 2\n");
  REQUIRE_THROWS_WITH(casbr::load_edge_list(bad),
                      Catch::Matchers::ContainsSubstring("line 2"));
  std::istringstream many("0 1 2\n");
  REQUIRE_THROWS_WITH(casbr::load_edge_list(many),
                      Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("empty input is an empty graph, not an error") {
  std::istringstream in("");
  auto loaded = casbr::load_edge_list(in);
  REQUIRE(loaded.graph.node_count() == 0);
  REQUIRE(loaded.graph.edge_count() == 0);
}

TEST_CASE("dense remapping is optional") {
  std::istringstream sparse_ids("10 20\n20 30\n");
  auto dense = casbr::load_edge_list(sparse_ids);
  REQUIRE(dense.graph.node_count() == 3);
  std::istringstream sparse_again("10 20\n20 30\n");
  auto raw = casbr::load_edge_list(sparse_again, /*dense_ids=*/false);
  REQUIRE(raw.graph.node_count() == 31);
  REQUIRE(raw.graph.edge_count() == 2);
}

TEST_CASE("barabasi-albert: construction identities") {
  auto g = casbr::generate_barabasi_albert(4, 3, RngSeed{1, 0});
  REQUIRE(g.node_count() == 4);
  // m=3 core is a triangle, one newcomer attaches to all three: K4.
  REQUIRE(g.edge_count() == 6);

  auto big = casbr::generate_barabasi_albert(300, 3, RngSeed{2, 0});
  REQUIRE(big.node_count() == 300);
  REQUIRE(big.edge_count() == 3 * (300 - 3) + 3);
  for (NodeId v = 3; v < 300; ++v) REQUIRE(big.degree(v) >= 3);
  check_invariants(big);
}

TEST_CASE("barabasi-albert: paper-scale graph and determinism") {
  auto a = casbr::generate_barabasi_albert(5000, 3, RngSeed{7, 0});
  REQUIRE(a.node_count() == 5000);
  auto b = casbr::generate_barabasi_albert(5000, 3, RngSeed{7, 0});
  REQUIRE(a.edges() == b.edges());
  auto c = casbr::generate_barabasi_albert(5000, 3, RngSeed{8, 0});
  REQUIRE(a.edges() != c.edges());
}

TEST_CASE("barabasi-albert: parameter validation") {
  REQUIRE_THROWS_AS(casbr::generate_barabasi_albert(3, 3, RngSeed{}), std::invalid_argument);
  REQUIRE_THROWS_AS(casbr::generate_barabasi_albert(5, 0, RngSeed{}), std::invalid_argument);
}

TEST_CASE("forest-fire: no burning yields a tree") {
  auto g = casbr::generate_forest_fire(50, 0.0, 0.0, RngSeed{3, 0});
  REQUIRE(g.node_count() == 50);
  REQUIRE(g.edge_count() == 49);
  check_invariants(g);
}

TEST_CASE("forest-fire: paper configuration and determinism") {
  auto a = casbr::generate_forest_fire(5000, 0.35, 0.4, RngSeed{4, 0});
  REQUIRE(a.node_count() == 5000);
  auto b = casbr::generate_forest_fire(5000, 0.35, 0.4, RngSeed{4, 0});
  REQUIRE(a.edges() == b.edges());
  check_invariants(a);
}

TEST_CASE("forest-fire: parameter validation") {
  REQUIRE_THROWS_AS(casbr::generate_forest_fire(10, 1.5, 0.4, RngSeed{}), std::invalid_argument);
  REQUIRE_THROWS_AS(casbr::generate_forest_fire(10, 0.3, -0.1, RngSeed{}), std::invalid_argument);
  REQUIRE_THROWS_AS(casbr::generate_forest_fire(0, 0.3, 0.4, RngSeed{}), std::invalid_argument);
}

TEST_CASE("diameter: hand-checked cases") {
  REQUIRE(casbr::diameter(oracles::make_graph(4, {{0, 1}, {1, 2}, {2, 3}})) == 3);
  REQUIRE(casbr::diameter(oracles::make_graph(4, {{0, 1}, {2, 3}})) == 1);
  REQUIRE(casbr::diameter(Graph{}) == 0);
  REQUIRE(casbr::diameter(Graph::from_edges(1, {})) == 0);
}

TEST_CASE("diameter: toy network matches the all-pairs oracle") {
  std::istringstream in(fixtures::kToyEdgeList);
  auto g = casbr::load_edge_list(in).graph;
  REQUIRE(casbr::diameter(g) == oracles::floyd_warshall_diameter(g));
}

TEST_CASE("diameter: random graphs match the all-pairs oracle") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    casbr::Rng rng(RngSeed{seed, 99});
    std::size_t n = 20 + rng.below(180);
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::size_t m = rng.below(3 * n);
    for (std::size_t i = 0; i < m; ++i) {
      auto u = static_cast<NodeId>(rng.below(n));
      auto v = static_cast<NodeId>(rng.below(n));
      if (u != v) edges.emplace_back(u, v);
    }
    auto g = Graph::from_edges(n, edges);
    REQUIRE(casbr::diameter(g) == oracles::floyd_warshall_diameter(g));
  }
}

TEST_CASE("construction invariants hold for arbitrary edge soup") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    casbr::Rng rng(RngSeed{seed, 12});
    std::size_t n = 1 + rng.below(60);
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::size_t m = rng.below(4 * n);
    for (std::size_t i = 0; i < m; ++i)
      edges.emplace_back(static_cast<NodeId>(rng.below(n)),
                         static_cast<NodeId>(rng.below(n)));
    check_invariants(Graph::from_edges(n, edges));
  }
}

TEST_CASE("generators produce exactly n nodes") {
  for (std::size_t n : {5, 17, 120}) {
    REQUIRE(casbr::generate_barabasi_albert(n, 3, RngSeed{1, 1}).node_count() == n);
    REQUIRE(casbr::generate_forest_fire(n, 0.35, 0.4, RngSeed{1, 2}).node_count() == n);
  }
}
