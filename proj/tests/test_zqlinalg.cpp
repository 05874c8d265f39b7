#include <gtest/gtest.h>

#include <random>

#include "ipe/zqlinalg.hpp"

using namespace ipe;

namespace {

ZqMatrix j_minus_i(std::size_t n, u64 q) {
  ZqMatrix f = ZqMatrix::ones(n, n, q);
  for (std::size_t i = 0; i < n; ++i) f.set(i, i, 0);
  return f;
}

ZqMatrix random_matrix(std::size_t r, std::size_t c, u64 q, std::mt19937_64& rng) {
  ZqMatrix f(r, c, q);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) f.set(i, j, rng() % q);
  return f;
}

}  // namespace

TEST(Zqlinalg, RankExamples) {
  EXPECT_EQ(rank_mod_p(j_minus_i(3, 2), 2), 2u);
  EXPECT_EQ(rank_mod_p(j_minus_i(4, 2), 2), 4u);
  EXPECT_EQ(rank_mod_p(j_minus_i(3, 3), 3), 3u);
  for (u64 p : {2u, 5u, 7u}) EXPECT_EQ(rank_mod_p(ZqMatrix::identity(5, p), p), 5u);
  EXPECT_EQ(rank_mod_p(ZqMatrix(3, 3, 5), 5), 0u);
  EXPECT_THROW(rank_mod_p(ZqMatrix::identity(2, 6), 6), Error);
}

TEST(Zqlinalg, RankOfResidue) {
  // Entries mod 6 read modulo the prime 3.
  const ZqMatrix f = ZqMatrix::from_rows(6, {{3, 0}, {0, 2}});
  EXPECT_EQ(rank_mod_p(f, 3), 1u);
  EXPECT_EQ(rank_mod_p(f, 2), 1u);
}

TEST(Zqlinalg, FactorExamples) {
  const auto id = factor_rank(ZqMatrix::identity(2, 3), 3);
  EXPECT_EQ(id.rank, 2u);
  EXPECT_EQ(id.u, ZqMatrix::identity(2, 3));
  EXPECT_EQ(id.v, ZqMatrix::identity(2, 3));
  const auto ones = factor_rank(ZqMatrix::ones(2, 2, 2), 2);
  EXPECT_EQ(ones.rank, 1u);
  EXPECT_EQ(ones.u, ZqMatrix::from_rows(2, {{1}, {1}}));
  EXPECT_EQ(ones.v, ZqMatrix::from_rows(2, {{1, 1}}));
}

TEST(Zqlinalg, FactorRoundTrip) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ZqMatrix f = random_matrix(5, 5, 7, rng);
    const auto rf = factor_rank(f, 7);
    EXPECT_EQ(rf.rank, rank_mod_p(f, 7));
    EXPECT_EQ(multiply(rf.u, rf.v), f);
  }
  // Low rank products.
  for (int trial = 0; trial < 20; ++trial) {
    const ZqMatrix f = multiply(random_matrix(6, 2, 5, rng), random_matrix(2, 4, 5, rng));
    const auto rf = factor_rank(f, 5);
    EXPECT_LE(rf.rank, 2u);
    EXPECT_EQ(multiply(rf.u, rf.v), f);
  }
}

TEST(Zqlinalg, ResidueMatrix) {
  EXPECT_EQ(residue_matrix(ZqMatrix::from_rows(6, {{5}}), 3), ZqMatrix::from_rows(3, {{2}}));
  EXPECT_EQ(residue_matrix(ZqMatrix(2, 2, 6), 2), ZqMatrix(2, 2, 2));
  ZqMatrix d(6, 6, 6);
  for (std::size_t i = 0; i < 6; ++i) d.set(i, i, (i + 1) % 6);
  ZqMatrix want(6, 6, 2);
  for (std::size_t i = 0; i < 6; ++i) want.set(i, i, (i + 1) % 2);
  EXPECT_EQ(residue_matrix(d, 2), want);
  EXPECT_THROW(residue_matrix(d, 5), Error);
}

TEST(Zqlinalg, CheckTriangular) {
  // Stars above the diagonal may hold anything.
  const ZqMatrix star = ZqMatrix::from_rows(7, {{3, 5, 1}, {0, 2, 6}, {0, 0, 4}});
  EXPECT_TRUE(check_triangular(star, identity_witness(3, 3)));
  EXPECT_TRUE(check_triangular(ZqMatrix::identity(4, 5), identity_witness(4, 4)));
  EXPECT_FALSE(check_triangular(ZqMatrix(3, 3, 5), identity_witness(3, 3)));
  EXPECT_FALSE(check_triangular(transpose(star), identity_witness(3, 3)));
  TriangularWitness bad = identity_witness(3, 3);
  bad.row_order = {0, 0, 1};
  try {
    check_triangular(star, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadPermutation);
  }
}

TEST(Zqlinalg, Pigeonhole) {
  auto diag = [](std::vector<u64> d, u64 q) {
    ZqMatrix f(d.size(), d.size(), q);
    for (std::size_t i = 0; i < d.size(); ++i) f.set(i, i, d[i]);
    return f;
  };
  const Modulus six = factorize(6);
  const auto units = pigeonhole_factor(diag({1, 1, 1, 1}, 6), identity_witness(4, 4), six);
  EXPECT_EQ(units.diagonal_indices.size(), 4u);
  const auto mixed = pigeonhole_factor(diag({2, 3, 2, 3}, 6), identity_witness(4, 4), six);
  EXPECT_EQ(mixed.diagonal_indices.size(), 2u);
  if (mixed.prime == 3) EXPECT_EQ(mixed.diagonal_indices, (std::vector<std::size_t>{0, 2}));
  else EXPECT_EQ(mixed.diagonal_indices, (std::vector<std::size_t>{1, 3}));
  const auto twos = pigeonhole_factor(diag({2, 2, 2}, 6), identity_witness(3, 3), six);
  EXPECT_EQ(twos.prime, 3u);
  EXPECT_EQ(twos.diagonal_indices.size(), 3u);
  EXPECT_THROW(pigeonhole_factor(diag({1, 0}, 6), identity_witness(2, 2), six), Error);
  EXPECT_THROW(pigeonhole_factor(diag({1, 1}, 6), identity_witness(2, 2), factorize(30)), Error);
}

TEST(Zqlinalg, MatrixBasics) {
  const ZqMatrix a = ZqMatrix::from_rows(5, {{1, 2, 3}, {4, 1, 2}});
  EXPECT_EQ(a.at(1, 1), 1u);
  EXPECT_EQ(transpose(transpose(a)), a);
  const std::vector<std::size_t> rows{1}, cols{0, 2};
  EXPECT_EQ(submatrix(a, rows, cols), ZqMatrix::from_rows(5, {{4, 2}}));
  EXPECT_THROW(multiply(a, a), Error);
  EXPECT_EQ(multiply(ZqMatrix::identity(2, 5), a), a);
}
