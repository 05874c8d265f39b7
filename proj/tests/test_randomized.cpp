#include <gtest/gtest.h>

#include "ipe/randomized.hpp"

using namespace ipe;

TEST(Eps, Parse) {
  EXPECT_EQ(Eps::parse("1/8").den, 8u);
  EXPECT_EQ(Eps::parse("0.125").den, 8u);
  EXPECT_EQ(Eps::parse("2/8").str(), "1/4");
  EXPECT_EQ(Eps::parse(".5").str(), "1/2");
  for (const char* bad : {"0", "1", "1/1", "2/1", "abc", "-0.1", "0/5", "1.5", ""}) {
    try {
      Eps::parse(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::BadEps) << bad;
    }
  }
}

TEST(Randomized, Lengths) {
  EXPECT_EQ(rand_encode_eq(1024, 7, Eps::make(1, 8)).max_length, 9u);
  EXPECT_EQ(rand_encode_neq(1024, 7, Eps::make(1, 8)).max_length, 8u);
  EXPECT_EQ(rand_encode_neq(2, 7, Eps::make(1, 2)).max_length, 2u);
  EXPECT_EQ(rand_encode_eq(10, 2, Eps::make(1, 4)).max_length, 5u);
  EXPECT_EQ(rand_encode_gt(16, 11, Eps::make(1, 4)).max_length, 65u);
  const auto gt256 = rand_encode_gt(256, 11, Eps::make(1, 4));
  EXPECT_EQ(gt256.m, 8u);
  EXPECT_EQ(gt256.c, 32u);
  EXPECT_EQ(gt256.max_length, 257u);
  EXPECT_THROW(rand_encode_gt(256, 7, Eps::make(1, 4)), Error);
}

TEST(Randomized, SamplesAreDeterministic) {
  const auto pe = rand_encode_gt(16, 11, Eps::make(1, 4));
  const Encoding a = sample(pe, 99), b = sample(pe, 99);
  for (u64 x = 0; x < 16; ++x) {
    EXPECT_EQ(a.x(x), b.x(x));
    EXPECT_EQ(a.y(x), b.y(x));
  }
  EXPECT_EQ(draw_tables(pe, 1), draw_tables(pe, 1));
  EXPECT_NE(draw_tables(pe, 1), draw_tables(pe, 2));
}

TEST(Randomized, ExactErrors) {
  const auto neq = rand_encode_neq_buckets(5, 7, 8);
  EXPECT_DOUBLE_EQ(exact_pair_error(neq, 0, 1), 0.125);
  EXPECT_DOUBLE_EQ(exact_pair_error(neq, 2, 2), 0.0);
  EXPECT_DOUBLE_EQ(exact_error(neq).worst_pair_error, 0.125);
  const auto eq = rand_encode_eq(1024, 7, Eps::make(1, 8));
  EXPECT_DOUBLE_EQ(exact_error(eq).worst_pair_error, 0.125);
  EXPECT_DOUBLE_EQ(exact_pair_error(eq, 3, 3), 0.0);
}

TEST(Randomized, DiagonalNeverErrs) {
  const auto eq = rand_encode_eq(64, 7, Eps::make(1, 8));
  const auto gt = rand_encode_gt(16, 11, Eps::make(1, 4));
  for (u64 seed = 0; seed < 50; ++seed) {
    const Encoding e = sample(eq, seed);
    const Encoding g = sample(gt, seed);
    for (u64 x = 0; x < 64; ++x) EXPECT_EQ(inner_product(e.x(x), e.y(x), 7), 0u);
    for (u64 x = 0; x < 16; ++x) EXPECT_EQ(inner_product(g.x(x), g.y(x), 11), 10u);
  }
}

TEST(Randomized, EnumerationMatchesClosedForm) {
  const auto gt = rand_encode_gt_buckets(4, 5, 2);
  const ErrorReport en = enumerate_error(gt);
  const ErrorReport ex = exact_error(gt);
  EXPECT_NEAR(en.worst_pair_error, ex.worst_pair_error, 1e-12);
  EXPECT_NEAR(en.avg_error, ex.avg_error, 1e-12);
  EXPECT_LE(en.worst_pair_error, 2.0 / 2.0);
  const auto neq = rand_encode_neq_buckets(3, 5, 3);
  EXPECT_NEAR(enumerate_error(neq).worst_pair_error, 1.0 / 3.0, 1e-12);
}

TEST(Randomized, MonteCarloNearExact) {
  const auto neq = rand_encode_neq_buckets(4, 7, 4);
  const ErrorReport mc = monte_carlo_error(neq, 20000, 17);
  EXPECT_EQ(mc.mode, ErrorMode::MonteCarlo);
  EXPECT_NEAR(mc.worst_pair_error, 0.25, mc.radius + 0.01);
  const ErrorReport again = monte_carlo_error(neq, 20000, 17);
  EXPECT_EQ(mc.worst_pair_error, again.worst_pair_error);
}

TEST(Randomized, ProbabilisticRank) {
  std::vector<std::pair<ZqMatrix, double>> single{{ZqMatrix::identity(4, 5), 1.0}};
  EXPECT_EQ(prob_rank_upper(single), 4u);
  const auto neq = rand_encode_neq_buckets(4, 5, 2);
  EXPECT_LE(prob_rank_upper(gram_support(neq)), 2u);
  const auto eq = rand_encode_eq_buckets(4, 5, 2);
  EXPECT_LE(prob_rank_upper(gram_support(eq)), 3u);
}
