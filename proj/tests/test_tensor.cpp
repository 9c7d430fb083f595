#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace multitrek;
using namespace testing_support;

namespace {

Matrix<Rational> mat(std::size_t r, std::size_t c, std::vector<long> v) {
  std::vector<Rational> d;
  for (long x : v) d.emplace_back(x);
  return Matrix<Rational>({r, c}, d);
}

// Tucker product straight from the index sum.
Tensor<Rational> tucker_by_sum(const Tensor<Rational>& t, const Matrix<Rational>& m) {
  const std::size_t k = t.order(), n = m.dim(1);
  auto out = Tensor<Rational>::cubical(k, n);
  out.for_each([&](const auto& idx, const Rational&) {
    Rational s(0);
    t.for_each([&](const auto& j, const Rational& v) {
      Rational term = v;
      for (std::size_t a = 0; a < k; ++a) term *= m(j[a], idx[a]);
      s += term;
    });
    out.at(idx) = s;
  });
  return out;
}

}  // namespace

TEST(Tensor, IndexingIsRowMajor) {
  Tensor<Rational> t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.offset(std::vector<std::size_t>{1, 2, 3}), 23u);
  EXPECT_EQ(t.unravel(17), (std::vector<std::size_t>{1, 1, 1}));
  t(1, 0, 2) = 5;
  EXPECT_EQ(t.data()[14], 5);
  EXPECT_THROW(t(2, 0, 0), IndexOutOfRange);
  EXPECT_THROW(t(0, 0), DimMismatch);
  EXPECT_THROW(Tensor<Rational>({2, 2}, std::vector<Rational>(3)), DimMismatch);
}

TEST(Tensor, TuckerWithIdentityIsNoop) {
  std::mt19937_64 rng(1);
  auto t = random_tensor(rng, {3, 3, 3});
  EXPECT_EQ(tucker_apply(t, Matrix<Rational>::identity(3)), t);
}

TEST(Tensor, TuckerAtOrderTwoIsCongruence) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    auto t = random_tensor(rng, {3, 3});
    auto m = random_tensor(rng, {3, 3});
    EXPECT_EQ(tucker_apply(t, m), matmul(matmul(transpose(m), t), m));
  }
}

TEST(Tensor, TuckerComposes) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto t = random_tensor(rng, {2, 2});
    auto m = random_tensor(rng, {2, 2});
    auto n = random_tensor(rng, {2, 2});
    EXPECT_EQ(tucker_apply(tucker_apply(t, m), n), tucker_apply(t, matmul(m, n)));
  }
  for (std::size_t k = 3; k <= 4; ++k) {
    auto t = random_tensor(rng, std::vector<std::size_t>(k, 2));
    auto m = random_tensor(rng, {2, 2});
    EXPECT_EQ(tucker_apply(t, m), tucker_by_sum(t, m));
  }
}

TEST(Tensor, TuckerOnChainCumulant) {
  // diagonal third-order noise with a single unit entry at the first vertex
  auto e = Tensor<Polynomial>::cubical(3, 2);
  e(0, 0, 0) = Polynomial(1);
  auto lam = Polynomial::variable(0);
  auto a = Matrix<Polynomial>::matrix(2, 2);
  a(0, 0) = Polynomial(1);
  a(0, 1) = lam;
  a(1, 1) = Polynomial(1);
  auto c = tucker_apply(e, a);
  EXPECT_EQ(c(0, 0, 0), Polynomial(1));
  EXPECT_EQ(c(0, 0, 1), lam);
  EXPECT_EQ(c(1, 0, 1), lam * lam);
  EXPECT_EQ(c(1, 1, 1), lam * lam * lam);
  EXPECT_TRUE(is_symmetric(c));
}

TEST(Hyperdeterminant, MatrixCase) {
  EXPECT_EQ(hyperdeterminant(mat(2, 2, {1, 2, 3, 4})), -2);
  EXPECT_EQ(determinant(mat(3, 3, {2, 0, 1, 1, 3, 2, 1, 1, 2})), 6);
}

TEST(Hyperdeterminant, DiagonalAndSingleEntry) {
  std::vector<Rational> d{2, 3, 5};
  EXPECT_EQ(hyperdeterminant(diagonal_tensor<Rational>(4, d)), 30);
  std::mt19937_64 rng(4);
  for (std::size_t k = 2; k <= 5; ++k) {
    auto t = random_tensor(rng, std::vector<std::size_t>(k, 1));
    EXPECT_EQ(hyperdeterminant(t), t.data()[0]);
  }
  EXPECT_EQ(hyperdeterminant(Tensor<Rational>(std::vector<std::size_t>{0, 0, 0})), 1);
}

TEST(Hyperdeterminant, MatchesLeibnizOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) {
    const std::size_t k = 2 + rng() % 3, n = 1 + rng() % 3;
    auto t = random_tensor(rng, std::vector<std::size_t>(k, n));
    EXPECT_EQ(hyperdeterminant(t), leibniz_hyperdet(t)) << "k=" << k << " n=" << n;
  }
}

TEST(Hyperdeterminant, MultilinearInFirstModeSlices) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 30; ++i) {
    const std::size_t k = 2 + rng() % 3, n = 2 + rng() % 2;
    auto a = random_tensor(rng, std::vector<std::size_t>(k, n));
    auto b = a, mix = a;
    Rational alpha = random_rational(rng), beta = random_rational(rng);
    const std::size_t row = rng() % n;
    a.for_each([&](const auto& idx, const Rational&) {
      if (idx[0] != row) return;
      b.at(idx) = random_rational(rng);
      mix.at(idx) = alpha * a.at(idx) + beta * b.at(idx);
    });
    EXPECT_EQ(hyperdeterminant(mix), alpha * hyperdeterminant(a) + beta * hyperdeterminant(b));
  }
}

TEST(Hyperdeterminant, EqualRowsVanishAtOrderTwo) {
  std::mt19937_64 rng(7);
  auto t = random_tensor(rng, {3, 3});
  for (std::size_t j = 0; j < 3; ++j) t(2, j) = t(0, j);
  EXPECT_EQ(hyperdeterminant(t), 0);
}

TEST(Hyperdeterminant, RejectsNonCubical) {
  EXPECT_THROW(hyperdeterminant(Tensor<Rational>({2, 3})), NotCubical);
}

TEST(Subtensor, SelectsEntries) {
  std::mt19937_64 rng(8);
  auto t = random_tensor(rng, {4, 4});
  auto s = subtensor(t, {{1, 3}, {0, 2}});
  EXPECT_EQ(s(0, 0), t(1, 0));
  EXPECT_EQ(s(0, 1), t(1, 2));
  EXPECT_EQ(s(1, 0), t(3, 0));
  EXPECT_EQ(s(1, 1), t(3, 2));
  EXPECT_EQ(subtensor(t, {{0, 1, 2, 3}, {0, 1, 2, 3}}), t);
  EXPECT_EQ(hyperdeterminant(subtensor(t, {{1, 1}, {0, 2}})), 0);
  EXPECT_THROW(subtensor(t, {{5}, {0}}), IndexOutOfRange);
}

TEST(CauchyBinet, ClassicalAndRandom) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    auto a = random_tensor(rng, {2, 3});
    auto b = random_tensor(rng, {3, 2});
    EXPECT_TRUE(cauchy_binet_check(a, b));
  }
  auto a = random_tensor(rng, {3, 3, 3});
  EXPECT_TRUE(cauchy_binet_check(a, Matrix<Rational>::identity(3)));
  EXPECT_TRUE(cauchy_binet_check(random_tensor(rng, {2, 3, 2, 2}), random_tensor(rng, {3, 2})));
  EXPECT_THROW(cauchy_binet_check(random_tensor(rng, {2, 3, 3}), random_tensor(rng, {3, 2})), DimMismatch);
}

TEST(Tensor, JsonRoundTrip) {
  std::mt19937_64 rng(10);
  auto t = random_tensor(rng, {2, 3, 2});
  EXPECT_EQ(tensor_from_json<Rational>(tensor_to_json(t)), t);
  Tensor<double> f({2, 2}, std::vector<double>{0.5, -1.25, 3, 1e-3});
  EXPECT_EQ(tensor_from_json<double>(tensor_to_json(f)), f);
}
