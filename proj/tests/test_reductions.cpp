#include <gtest/gtest.h>

#include "ipe/encoders.hpp"
#include "ipe/reductions.hpp"

using namespace ipe;

namespace {

ReductionArgs args(u64 n, u64 t = 0, unsigned d = 0, u64 q = 0) {
  ReductionArgs a;
  a.n = n;
  a.t = t;
  a.d = d;
  a.q = q;
  return a;
}

}  // namespace

TEST(Reductions, BuiltinsVerify) {
  struct Case {
    const char* name;
    ReductionArgs a;
  };
  const std::vector<Case> cases = {
      {"DISJ=>INDEX", args(3)},        {"INDEX=>NEQ", args(5)},      {"INDEX=>GT", args(5)},
      {"ETHR=>ETHR1", args(5, 2)},     {"ETHR1=>GT", args(3)},        {"ETHR=>ETHR_T2", args(5, 2)},
      {"ETHR=>NEQ", args(4)},          {"MPOLY=>THR", args(3, 2, 0, 5)}, {"MPOLY=>OR_EQ", args(2, 0, 0, 3)},
      {"MPOLY=>NEQ", args(3, 0, 2, 3)}, {"OR_EQ=>NEQ", args(2, 0, 0, 3)}, {"THR=>THR1", args(4, 2)},
  };
  for (const Case& c : cases) {
    const Reduction r = builtin_reduction(c.name, c.a);
    EXPECT_TRUE(verify_reduction(r)) << c.name;
  }
}

TEST(Reductions, TableAndIndexToAny) {
  ReductionArgs a;
  a.predicate = Predicate::table(2, 3, {0, 1, 1, 1, 0, 0});
  EXPECT_TRUE(verify_reduction(builtin_reduction("TABLE=>ANY", a)));
  a.predicate = Predicate::gt(4);
  EXPECT_TRUE(verify_reduction(builtin_reduction("INDEX=>ANY", a)));
}

TEST(Reductions, EthrToNeqMapsComplements) {
  const Reduction r = builtin_reduction("ETHR=>NEQ", args(3));
  const Domain sets = Domain::subsets(3);
  EXPECT_EQ(sets.subset_at(r.f(0)), 0b110u);
  EXPECT_EQ(sets.subset_at(r.g(1)), 0b101u);
  EXPECT_TRUE(r.target.eval(r.f(0), r.g(1)));
  EXPECT_TRUE(r.source.eval(0, 1));
}

TEST(Reductions, Ethr1ToGtSendsOneToEmpty) {
  const Reduction r = builtin_reduction("ETHR1=>GT", args(2));
  EXPECT_EQ(Domain::subsets(2).subset_at(r.f(0)), 0u);
  for (u64 y = 0; y < 3; ++y) EXPECT_FALSE(r.target.eval(r.f(0), r.g(y)));
}

TEST(Reductions, ApplyTransportsEncodings) {
  const Reduction r = builtin_reduction("INDEX=>GT", args(6));
  const Encoding e = apply_reduction(r, encode_index(6, factorize(30)));
  EXPECT_EQ(e.length, 2u);
  EXPECT_TRUE(verify(Predicate::gt(6), e).ok());
}

TEST(Reductions, Compose) {
  const Reduction inner = builtin_reduction("INDEX=>NEQ", args(3));
  const Reduction outer = builtin_reduction("DISJ=>INDEX", args(3));
  const Reduction c = compose(inner, outer);
  EXPECT_TRUE(verify_reduction(c));
  const DisjointnessEncoding d = encode_disj(3, 1);
  EXPECT_TRUE(verify(Predicate::neq(3), apply_reduction(c, d.encoding)).ok());
}

TEST(Reductions, RejectsUnknown) { EXPECT_THROW(builtin_reduction("GT=>EQ", args(3)), Error); }
