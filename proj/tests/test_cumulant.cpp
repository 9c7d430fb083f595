#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace multitrek;
using namespace testing_support;

namespace {

Rational entry(const Tensor<Rational>& c, const MixedGraph& g, std::vector<Vertex> idx) {
  std::vector<std::size_t> pos;
  for (Vertex v : idx) pos.push_back(g.index_of(v));
  return c.at(pos);
}

}  // namespace

TEST(PathMatrix, ChainAndZeroWeights) {
  auto g = chain2();
  ModelInstance<Rational> inst;
  inst.lambda[{1, 2}] = Rational(3, 2);
  auto a = path_matrix(g, inst);
  EXPECT_EQ(a(0, 0), 1);
  EXPECT_EQ(a(0, 1), Rational(3, 2));
  EXPECT_EQ(a(1, 0), 0);
  EXPECT_EQ(a(1, 1), 1);
  inst.lambda[{1, 2}] = 0;
  EXPECT_EQ(path_matrix(g, inst), Matrix<Rational>::identity(2));
}

TEST(PathMatrix, MatchesInverse) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    auto g = random_dag(rng, 1 + rng() % 7, 0.5);
    auto inst = sample_generic_instance(g, 2, rng());
    EXPECT_EQ(path_matrix(g, inst), inverse_path_matrix(g, inst.lambda));
  }
  auto sym = symbolic_instance(two_sources(), 2);
  auto a = path_matrix(two_sources(), sym.instance);
  EXPECT_EQ(sym.render(a(0, 4)), "l(1,4)*l(4,5)");
}

TEST(ModelCumulant, WorkedEntriesSymbolic) {
  auto g = two_sources();
  auto sym = symbolic_instance(g, 3);
  auto c2 = model_cumulant(g, sym.instance, 2);
  auto c3 = model_cumulant(g, sym.instance, 3);
  auto var = [&](const std::string& name) {
    auto it = std::find(sym.names.begin(), sym.names.end(), name);
    return Polynomial::variable(static_cast<int>(it - sym.names.begin()));
  };
  Polynomial l14 = var("l(1,4)"), l45 = var("l(4,5)"), l16 = var("l(1,6)"), l17 = var("l(1,7)");
  EXPECT_EQ(c2(3, 4), var("k2(4)") * l45 + var("k2(1)") * l14 * l14 * l45);
  EXPECT_EQ(c3(4, 5, 6), var("k3(1)") * l14 * l45 * l16 * l17);
  EXPECT_TRUE(c3(4, 5, 7).is_zero());
  EXPECT_TRUE(is_symmetric(c3));
}

TEST(ModelCumulant, MatchesBruteForceSum) {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 40; ++i) {
    auto g = random_mixed(rng, 1 + rng() % 5, 0.5, rng() % 2);
    const int k = 2 + static_cast<int>(rng() % 3);
    auto inst = sample_generic_instance(g, k, rng());
    auto c = model_cumulant(g, inst, k);
    c.for_each([&](const auto& pos, const Rational& v) {
      std::vector<Vertex> idx;
      for (std::size_t p : pos) idx.push_back(g.vertices()[p]);
      EXPECT_EQ(v, cumulant_entry(g, inst, idx));
    });
    EXPECT_TRUE(is_symmetric(c));
  }
}

TEST(ModelCumulant, TrekRuleEntrywise) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 40; ++i) {
    auto g = random_mixed(rng, 2 + rng() % 4, 0.5, rng() % 2);
    const int k = 2 + static_cast<int>(rng() % 3);
    auto inst = sample_generic_instance(g, k, rng());
    auto c = model_cumulant(g, inst, k);
    for (int t = 0; t < 10; ++t) {
      std::vector<Vertex> idx;
      for (int s = 0; s < k; ++s) idx.push_back(g.vertices()[rng() % g.size()]);
      EXPECT_EQ(cumulant_entry_by_trek_rule(g, inst, idx), entry(c, g, idx)) << serialize_graph(g);
    }
  }
}

TEST(ModelCumulant, SubtensorMatchesFull) {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 30; ++i) {
    auto g = random_mixed(rng, 2 + rng() % 5, 0.5, rng() % 2);
    const std::size_t k = 2 + rng() % 3;
    auto sides = random_sides(rng, g, k, 1 + rng() % 2);
    auto inst = sample_generic_instance(g, static_cast<int>(k), rng());
    auto full = model_cumulant(g, inst, static_cast<int>(k));
    std::vector<std::vector<std::size_t>> pos(k);
    for (std::size_t s = 0; s < k; ++s)
      for (Vertex v : sides[s]) pos[s].push_back(g.index_of(v));
    EXPECT_EQ(cumulant_subtensor(g, inst, sides), subtensor(full, pos));
  }
  EXPECT_THROW(cumulant_subtensor(chain2(), sample_generic_instance(chain2(), 2, 1), {{1}, {7}}), IndexOutOfRange);
}

TEST(ModelCumulant, MissingOrder) {
  auto inst = sample_generic_instance(chain2(), 2, 1);
  EXPECT_THROW(model_cumulant(chain2(), inst, 3), MissingOrder);
}

TEST(DetByTrekSystems, WorkedDeterminantsSymbolic) {
  auto g = two_sources();
  auto sym = symbolic_instance(g, 3);
  auto d2 = det_by_trek_systems(g, sym.instance, {{4, 6}, {7, 8}});
  EXPECT_EQ(d2, hyperdeterminant(cumulant_subtensor(g, sym.instance, {{4, 6}, {7, 8}})));
  auto var = [&](const std::string& name) {
    auto it = std::find(sym.names.begin(), sym.names.end(), name);
    return Polynomial::variable(static_cast<int>(it - sym.names.begin()));
  };
  EXPECT_EQ(d2, var("k2(1)") * var("k2(2)") * var("l(1,4)") * var("l(1,7)") * var("l(2,6)") * var("l(2,8)"));
  auto d3 = det_by_trek_systems(g, sym.instance, {{4, 6}, {5, 8}, {7, 8}});
  Polynomial l14 = var("l(1,4)"), l28 = var("l(2,8)");
  EXPECT_EQ(d3, var("k3(1)") * var("k3(2)") * l14 * l14 * var("l(4,5)") * var("l(1,7)") * var("l(2,6)") * l28 * l28);
  EXPECT_TRUE(det_by_trek_systems(g, sym.instance, {{3, 4}, {5, 6}}).is_zero());
}

TEST(DetByTrekSystems, MatchesHyperdeterminant) {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 80; ++i) {
    auto g = random_mixed(rng, 2 + rng() % 5, 0.5, rng() % 2);
    const std::size_t k = 2 + rng() % 3;
    const std::size_t n = 1 + rng() % std::min<std::size_t>(3, g.size());
    auto sides = random_sides(rng, g, k, n);
    auto inst = sample_generic_instance(g, static_cast<int>(k), rng());
    auto sub = cumulant_subtensor(g, inst, sides);
    EXPECT_EQ(det_by_trek_systems(g, inst, sides), leibniz_hyperdet(sub)) << serialize_graph(g) << nlohmann::json(sides);
  }
}

TEST(DetByTrekSystems, EmptySidesGiveOne) {
  auto inst = sample_generic_instance(chain2(), 2, 3);
  EXPECT_EQ(det_by_trek_systems(chain2(), inst, {{}, {}}), 1);
}

TEST(GenericInstance, DeterministicSupportAndRange) {
  auto g = two_sources();
  auto a = sample_generic_instance(g, 3, 42);
  EXPECT_EQ(a, sample_generic_instance(g, 3, 42));
  std::vector<Edge> keys;
  for (const auto& [e, w] : a.lambda) {
    keys.push_back(e);
    EXPECT_NE(sgn(w), 0);
    EXPECT_LE(abs(w), kRangeBound);
  }
  EXPECT_EQ(keys, g.directed_edges());
  for (int k = 2; k <= 3; ++k) EXPECT_EQ(a.order(k).diag.size(), g.size());
  for (std::uint64_t s = 0; s < 100; ++s)
    EXPECT_NE(sample_generic_instance(g, 3, 2 * s), sample_generic_instance(g, 3, 2 * s + 1));
}

TEST(GenericInstance, MixedFoldsLatents) {
  auto g = triple_hyperedge();
  auto inst = sample_generic_instance(g, 3, 7);
  EXPECT_TRUE(inst.lambda.empty());
  EXPECT_EQ(inst.order(3).hyper.size(), 10u);
  EXPECT_NE(sgn(inst.noise_entry({1, 2, 3})), 0);
  // folding agrees with the cumulant of the canonical DAG
  auto cd = canonical_dag(g);
  std::mt19937_64 rng(7);
  ModelInstance<Rational> full;
  for (const auto& e : cd.dag.directed_edges()) full.lambda[e] = random_rational(rng) + 1;
  for (int k = 2; k <= 3; ++k)
    for (Vertex v : cd.dag.vertices()) full.noise[k].diag[v] = random_rational(rng) + 30;
  auto folded = detail::project_canonical(cd, full);
  for (int k = 2; k <= 3; ++k) {
    auto big = model_cumulant(cd.dag, full, k);
    auto small = model_cumulant(g, folded, k);
    small.for_each([&](const auto& pos, const Rational& v) { EXPECT_EQ(v, big.at(pos)); });
  }
}

TEST(GenericInstance, RepeatedHyperedgeMembers) {
  MixedGraph g({1, 2}, {}, {{1, 1, 2}});
  auto inst = sample_generic_instance(g, 2, 9);
  EXPECT_EQ(inst.order(2).hyper.size(), 3u);
}

TEST(InstanceJson, RoundTrip) {
  auto g = pairwise_bidirected();
  auto inst = sample_generic_instance(g, 4, 5);
  EXPECT_EQ(instance_from_json(instance_to_json(inst)), inst);
  EXPECT_THROW(instance_from_json(nlohmann::json::array()), SchemaError);
}
