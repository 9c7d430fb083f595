#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace multitrek;
using namespace testing_support;

TEST(Graph, ChainOrder) {
  MixedGraph g({1, 2, 3}, {{1, 2}, {2, 3}});
  EXPECT_EQ(validate_acyclic(g), (std::vector<Vertex>{1, 2, 3}));
}

TEST(Graph, ThreeCycleReportsCycle) {
  try {
    MixedGraph g({1, 2, 3}, {{1, 2}, {2, 3}, {3, 1}});
    FAIL() << "expected CycleError";
  } catch (const CycleError& e) {
    EXPECT_EQ(e.cycle(), (std::vector<Vertex>{1, 2, 3, 1}));
  }
}

TEST(Graph, TopologicalOrderRespectsEdges) {
  auto g = two_sources();
  auto order = validate_acyclic(g);
  ASSERT_EQ(order.size(), 8u);
  EXPECT_EQ(order[0], 1);
  EXPECT_EQ(order[1], 2);
  std::map<Vertex, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& [u, v] : g.directed_edges()) EXPECT_LT(pos[u], pos[v]);
}

TEST(Graph, RejectsMalformedInput) {
  EXPECT_THROW(MixedGraph({1, 1}, {}), InvalidArgument);
  EXPECT_THROW(MixedGraph({1, 2}, {{1, 3}}), InvalidArgument);
  EXPECT_THROW(MixedGraph({1, 2}, {{1, 1}}), InvalidArgument);
  EXPECT_THROW(MixedGraph({1, 2}, {}, {{1}}), InvalidArgument);
}

TEST(Graph, ReachabilityAndAncestors) {
  auto g = two_sources();
  EXPECT_TRUE(g.reaches(1, 5));
  EXPECT_FALSE(g.reaches(2, 5));
  EXPECT_TRUE(g.reaches(3, 3));
  EXPECT_EQ(g.ancestors(6), (std::vector<Vertex>{1, 2, 6}));
  EXPECT_EQ(g.children(1), (std::vector<Vertex>{4, 6, 7}));
  EXPECT_EQ(g.parents(6), (std::vector<Vertex>{1, 2}));
}

TEST(CanonicalDag, SingleHyperedge) {
  auto cd = canonical_dag(triple_hyperedge());
  EXPECT_TRUE(cd.dag.is_dag());
  EXPECT_EQ(cd.dag.vertices(), (std::vector<Vertex>{1, 2, 3, 4}));
  EXPECT_EQ(cd.dag.directed_edges(), (std::vector<Edge>{{4, 1}, {4, 2}, {4, 3}}));
  EXPECT_EQ(cd.latent_map.at({1, 2, 3}), 4);
  EXPECT_TRUE(cd.is_latent(4));
  EXPECT_FALSE(cd.is_latent(3));
}

TEST(CanonicalDag, IdentityOnDags) {
  auto g = two_sources();
  auto cd = canonical_dag(g);
  EXPECT_EQ(cd.dag, g);
  EXPECT_TRUE(cd.latent_map.empty());
}

TEST(CanonicalDag, KeepsDirectedEdges) {
  MixedGraph g({3, 4, 5, 6, 7}, {{3, 5}, {4, 5}}, {{4, 6, 7}});
  auto cd = canonical_dag(g);
  EXPECT_EQ(cd.dag.directed_edges(), (std::vector<Edge>{{3, 5}, {4, 5}, {8, 4}, {8, 6}, {8, 7}}));
  EXPECT_EQ(cd.latent_of(0), 8);
}

TEST(CanonicalDag, LatentIdsFollowSortedHyperedges) {
  auto cd = canonical_dag(pairwise_bidirected());
  EXPECT_EQ(cd.latent_map.at({1, 2}), 4);
  EXPECT_EQ(cd.latent_map.at({1, 3}), 5);
  EXPECT_EQ(cd.latent_map.at({2, 3}), 6);
}

TEST(CanonicalDag, IdempotentAndAcyclicOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto g = random_mixed(rng, 2 + rng() % 6, 0.4, rng() % 3);
    auto cd = canonical_dag(g);
    EXPECT_NO_THROW(validate_acyclic(cd.dag));
    EXPECT_EQ(canonical_dag(cd.dag).dag, cd.dag);
    for (const auto& [h, latent] : cd.latent_map) EXPECT_TRUE(cd.dag.parents(latent).empty());
  }
}

TEST(ParseGraph, Chain) {
  auto g = parse_graph(std::string(R"({"vertices":[1,2],"directed_edges":[[1,2]],"multidirected_edges":[]})"));
  EXPECT_EQ(g, chain2());
}

TEST(ParseGraph, SingleHyperedge) {
  auto g = parse_graph(std::string(R"({"vertices":[1,2,3],"directed_edges":[],"multidirected_edges":[[1,2,3]]})"));
  EXPECT_EQ(g, triple_hyperedge());
}

TEST(ParseGraph, SchemaErrorsCarryPath) {
  auto path_of = [](const std::string& text) {
    try {
      parse_graph(text);
    } catch (const SchemaError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(path_of(R"({"directed_edges":[],"multidirected_edges":[]})"), "/vertices");
  EXPECT_EQ(path_of(R"({"vertices":[1],"multidirected_edges":[]})"), "/directed_edges");
  EXPECT_EQ(path_of(R"({"vertices":[1,2],"directed_edges":[[1,5]],"multidirected_edges":[]})"),
            "/directed_edges/0/1");
  EXPECT_EQ(path_of(R"({"vertices":[1,"a"],"directed_edges":[],"multidirected_edges":[]})"), "/vertices/1");
  EXPECT_EQ(path_of(R"({"vertices":[1,2],"directed_edges":[],"multidirected_edges":[[1]]})"),
            "/multidirected_edges/0");
  EXPECT_EQ(path_of("not json"), "");
}

TEST(ParseGraph, CycleInDocument) {
  EXPECT_THROW(parse_graph(std::string(
                   R"({"vertices":[1,2],"directed_edges":[[1,2],[2,1]],"multidirected_edges":[]})")),
               CycleError);
}

TEST(ParseGraph, RoundTripOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto g = random_mixed(rng, 1 + rng() % 7, 0.5, rng() % 3);
    EXPECT_EQ(parse_graph(serialize_graph(g)), g);
  }
  MixedGraph labelled({1, 2}, {{1, 2}}, {}, {{1, "x"}, {2, "y"}});
  EXPECT_EQ(parse_graph(serialize_graph(labelled)), labelled);
}

TEST(ParseGraph, HashIsStable) {
  EXPECT_EQ(graph_hash(two_sources()), graph_hash(parse_graph(serialize_graph(two_sources()))));
  EXPECT_NE(graph_hash(two_sources()), graph_hash(collider()));
  EXPECT_EQ(graph_hash(chain2()).size(), 16u);
}
