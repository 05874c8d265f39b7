#include <gtest/gtest.h>

#include "ipe/encoders.hpp"

using namespace ipe;

namespace {

u64 set_index(u64 n, std::initializer_list<u64> elems) {
  u64 mask = 0;
  for (u64 e : elems) mask |= u64{1} << (e - 1);
  return Domain::subsets(n).index_of_subset(mask);
}

u64 ip(const Encoding& e, u64 x, u64 y) { return inner_product(e.x(x), e.y(y), e.q); }

}  // namespace

TEST(Encoders, EqMod2) {
  const Encoding e = encode_eq_mod2(3);
  EXPECT_EQ(e.x(1), (Vec{0, 1, 0}));
  EXPECT_EQ(e.y(1), (Vec{1, 0, 1}));
  EXPECT_EQ(ip(e, 1, 1), 0u);
  EXPECT_EQ(ip(e, 0, 1), 1u);
  EXPECT_TRUE(verify(Predicate::eq(1), encode_eq_mod2(1)).ok());
  for (u64 n = 1; n <= 8; ++n) EXPECT_TRUE(verify(Predicate::eq(n), encode_eq_mod2(n)).ok()) << n;
}

TEST(Encoders, EqLargeQ) {
  const Encoding e = encode_eq_large_q(3, 5);
  EXPECT_EQ(e.x(2), (Vec{1, 3}));
  EXPECT_EQ(e.y(2), (Vec{3, 4}));
  EXPECT_EQ(ip(e, 2, 2), 0u);
  EXPECT_EQ(ip(e, 0, 2), 2u);
  EXPECT_TRUE(verify(Predicate::eq(5), encode_eq_large_q(5, 5)).ok());
  try {
    encode_eq_large_q(6, 5);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::QTooSmall);
  }
}

TEST(Encoders, IndexBlock) {
  const Predicate p = Predicate::index(2);
  const u64 x = p.x_domain().index_of_bitstring("10");
  const Encoding e = encode_index(2, factorize(6));
  EXPECT_TRUE(p.eval(x, 1));
  EXPECT_EQ(ip(e, x, 1), 0u);
  EXPECT_TRUE(verify(p, e).ok());
  // Each y vector has exactly one nonzero coordinate.
  const Encoding e6 = encode_index(6, factorize(30));
  EXPECT_EQ(e6.length, 2u);
  for (u64 y = 0; y < 6; ++y) {
    const Vec v = e6.y(y);
    EXPECT_EQ(std::count_if(v.begin(), v.end(), [](u64 c) { return c != 0; }), 1);
  }
  EXPECT_TRUE(verify(Predicate::index(6), e6).ok());
  EXPECT_TRUE(verify(Predicate::index(5), encode_index(5, factorize(6))).ok());
  EXPECT_THROW(encode_index(2, factorize(30)), Error);
}

TEST(Encoders, IndexAsPrintedEncodesComplement) {
  for (u64 n : {2u, 4u}) {
    const Predicate p = Predicate::index(n);
    const Encoding e = encode_index(n, factorize(6), IndexExponent::AsPrinted);
    const auto report = verify(p, e);
    EXPECT_EQ(report.mismatches.size(), report.checked_pairs);
  }
}

TEST(Encoders, IndexWarmup) {
  const Predicate p = Predicate::index(2);
  const u64 x = p.x_domain().index_of_bitstring("10");
  const Encoding e = encode_index_warmup(2, factorize(6));
  EXPECT_EQ(e.x(x), Vec{3});
  EXPECT_EQ(e.y(0), Vec{3});
  EXPECT_EQ(ip(e, x, 0), 3u);
  EXPECT_FALSE(p.eval(x, 0));
  EXPECT_TRUE(verify(p, e).ok());
  EXPECT_TRUE(verify(Predicate::index(3), encode_index_warmup(3, factorize(30))).ok());
  EXPECT_THROW(encode_index_warmup(3, factorize(6)), Error);
}

TEST(Encoders, Neq) {
  for (u64 n = 1; n <= 8; ++n) EXPECT_TRUE(verify(Predicate::neq(n), encode_neq(n, factorize(11))).ok()) << n;
  const Encoding e = encode_neq(6, factorize(30));
  EXPECT_EQ(e.length, 2u);
  EXPECT_TRUE(verify(Predicate::neq(6), e).ok());
}

TEST(Encoders, DisjPrimes) {
  EXPECT_EQ(disj_primes(4, 1), (std::vector<u64>{5}));
  EXPECT_EQ(disj_primes(4, 2), (std::vector<u64>{5, 61}));
  EXPECT_EQ(disj_primes(6, 2), (std::vector<u64>{7, 197}));
  EXPECT_EQ(disj_primes(3, 3).size(), 3u);
  try {
    disj_primes(40, 8);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::Overflow);
  }
}

TEST(Encoders, Disj) {
  const DisjointnessEncoding one = encode_disj(4, 1);
  EXPECT_EQ(one.modulus.q(), 5u);
  EXPECT_EQ(one.encoding.length, 4u);
  EXPECT_EQ(one.encoding.x(set_index(4, {1})), (Vec{1, 0, 0, 0}));
  EXPECT_EQ(ip(one.encoding, set_index(4, {1}), set_index(4, {1, 2})), 1u);
  EXPECT_TRUE(verify(Predicate::disj(4), one.encoding).ok());

  const DisjointnessEncoding two = encode_disj(4, 2);
  EXPECT_EQ(two.modulus.q(), 305u);
  EXPECT_EQ(two.encoding.length, 2u);
  EXPECT_EQ(two.encoding.x(set_index(4, {1})), (Vec{61, 0}));
  EXPECT_EQ(two.encoding.y(set_index(4, {2})), (Vec{5, 0}));
  EXPECT_EQ(ip(two.encoding, set_index(4, {1}), set_index(4, {2})), 0u);
  const auto report = verify(Predicate::disj(4), two.encoding);
  EXPECT_EQ(report.checked_pairs, 256u);
  EXPECT_TRUE(report.ok());

  const DisjointnessEncoding full = encode_disj(3, 3);
  EXPECT_EQ(full.encoding.length, 1u);
  EXPECT_TRUE(verify(Predicate::disj(3), full.encoding).ok());
  EXPECT_TRUE(verify(Predicate::disj(5), encode_disj(5, 2).encoding).ok());
}

TEST(Encoders, GtPrime) {
  const Encoding e = encode_gt_prime(3, 5);
  EXPECT_EQ(e.x(2), (Vec{0, 0, 1}));
  EXPECT_EQ(e.y(1), (Vec{1, 1, 0}));
  EXPECT_EQ(ip(e, 2, 1), 0u);
  EXPECT_EQ(ip(e, 1, 1), 1u);
  for (u64 y = 0; y < 3; ++y) EXPECT_EQ(ip(e, 0, y), 1u);
  for (u64 n = 1; n <= 8; ++n) EXPECT_TRUE(verify(Predicate::gt(n), encode_gt_prime(n, 11)).ok()) << n;
}

TEST(Encoders, GtKPrimes) {
  const Encoding e = encode_gt_kprimes(2, factorize(6));
  EXPECT_EQ(e.x(1), Vec{2});
  EXPECT_EQ(e.y(0), Vec{3});
  EXPECT_EQ(ip(e, 1, 0), 0u);
  EXPECT_EQ(e.x(0), Vec{1});
  EXPECT_EQ(ip(e, 0, 0), 3u);
  EXPECT_EQ(ip(e, 0, 1), 1u);
  for (u64 q : {6u, 30u, 210u}) {
    const Modulus m = factorize(q);
    EXPECT_TRUE(verify(Predicate::gt(m.k()), encode_gt_kprimes(m.k(), m)).ok()) << q;
  }
  EXPECT_THROW(encode_gt_kprimes(3, factorize(6)), Error);
}

TEST(Encoders, GtComposite) {
  const Encoding e = encode_gt(6, factorize(30));
  EXPECT_EQ(e.length, 2u);
  EXPECT_TRUE(verify(Predicate::gt(6), e).ok());
  EXPECT_EQ(encode_gt(6, factorize(6)).length, 3u);
  EXPECT_TRUE(verify(Predicate::gt(7), encode_gt(7, factorize(6))).ok());
}

TEST(Encoders, Ethr) {
  const Encoding gen = encode_ethr(2, 1, 5, EthrForm::General);
  EXPECT_EQ(gen.x(set_index(2, {1})), (Vec{1, 0, 1}));
  EXPECT_EQ(gen.y(set_index(2, {1, 2})), (Vec{1, 1, 4}));
  EXPECT_EQ(ip(gen, set_index(2, {1}), set_index(2, {1, 2})), 0u);

  const Encoding full = encode_ethr(3, 3, 7);
  EXPECT_EQ(full.length, 2u);
  EXPECT_EQ(full.x(set_index(3, {1, 2, 3})), (Vec{1, 1}));
  EXPECT_EQ(ip(full, set_index(3, {1, 2, 3}), set_index(3, {1, 2, 3})), 0u);

  const Encoding co = encode_ethr(3, 2, 7);
  EXPECT_EQ(co.length, 3u);
  EXPECT_EQ(co.x(set_index(3, {1, 3})), (Vec{0, 2, 1}));
  EXPECT_EQ(co.y(set_index(3, {1, 2, 3})), (Vec{1, 0, 0}));
  EXPECT_EQ(ip(co, set_index(3, {1, 3}), set_index(3, {1, 2, 3})), 0u);

  for (u64 n = 1; n <= 5; ++n)
    for (u64 t = 1; t <= n; ++t) {
      EXPECT_TRUE(verify(Predicate::ethr(n, t), encode_ethr(n, t, 7)).ok()) << n << "," << t;
      EXPECT_TRUE(verify(Predicate::ethr(n, t), encode_ethr(n, t, 7, EthrForm::General)).ok()) << n << "," << t;
    }
  EXPECT_EQ(encode_ethr(5, 4, 5).length, 6u);  // q < n + 2 falls back to the general form
  EXPECT_THROW(encode_ethr(5, 2, 3), Error);
}

TEST(Encoders, Mpoly) {
  EXPECT_EQ(monomial_masks(2, 1), (std::vector<u64>{0, 1, 2}));
  for (unsigned d = 0; d <= 2; ++d) {
    const Predicate p = Predicate::mpoly(2, d, 3);
    const Encoding e = encode_mpoly(2, d, 3);
    EXPECT_EQ(e.length, binomial_prefix(2, d));
    EXPECT_TRUE(verify(p, e).ok()) << d;
    // The zero polynomial sits at index 0 and vanishes everywhere.
    for (u64 x = 0; x < 9; ++x) EXPECT_EQ(ip(e, x, 0), 0u);
  }
  // d = 0, constant 2.
  const Encoding c = encode_mpoly(2, 0, 3);
  for (u64 x = 0; x < 9; ++x) EXPECT_EQ(ip(c, x, 2), 2u);
  EXPECT_TRUE(verify(Predicate::mpoly(2, 1, 6), encode_mpoly(2, 1, 6)).ok());
}

TEST(Encoders, Thr) {
  const Encoding small = encode_thr(2, 1, 3);
  EXPECT_EQ(ip(small, set_index(2, {1}), set_index(2, {1})), 0u);
  EXPECT_TRUE(verify(Predicate::thr(2, 1), small).ok());
  EXPECT_EQ(encode_thr(4, 3, 5).length, 11u);
  for (u64 t = 1; t <= 4; ++t) {
    const Encoding e = encode_thr(4, t, 5);
    EXPECT_EQ(e.length, binomial_prefix(4, 4 - t + 1));
    const auto r = verify(Predicate::thr(4, t), e);
    EXPECT_EQ(r.checked_pairs, 256u);
    EXPECT_TRUE(r.ok()) << t;
  }
  EXPECT_TRUE(verify(Predicate::thr(4, 3), encode_thr(4, 3, 77)).ok());
  try {
    encode_thr(4, 3, 3);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::QTooSmall);
  }
}

TEST(Encoders, OrEq) {
  for (u64 q : {3u, 5u})
    for (u64 n = 1; n <= 2; ++n) {
      const auto r = verify(Predicate::oreq(n, q), encode_oreq(n, q));
      EXPECT_TRUE(r.ok()) << n << "," << q;
      EXPECT_EQ(r.checked_pairs, checked_pow(q, 2 * n));
    }
  EXPECT_EQ(encode_oreq(2, 3).length, 4u);
  try {
    encode_oreq(2, 6);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::NotPrime);
  }
}

TEST(Encoders, OrEqProductFailsForComposite) {
  // x = (2, 0), y = (0, 3): no coordinate agrees, yet (2-0)(0-3) = -6 = 0 mod 6.
  const Predicate p = Predicate::oreq(2, 6);
  const Domain d = p.x_domain();
  const u64 x = d.index_of_vector(std::vector<u64>{2, 0});
  const u64 y = d.index_of_vector(std::vector<u64>{0, 3});
  EXPECT_FALSE(p.eval(x, y));
  EXPECT_EQ(mul_mod(2, residue_of(-3, 6), 6), 0u);
}

TEST(Encoders, FromMatrix) {
  const ZqMatrix jmi = ZqMatrix::from_rows(2, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const Encoding eq = encode_from_matrix(Predicate::eq(3), jmi, 2);
  EXPECT_EQ(eq.length, 2u);
  EXPECT_TRUE(verify(Predicate::eq(3), eq).ok());
  const Encoding neq = encode_from_matrix(Predicate::neq(3), ZqMatrix::identity(3, 3), 3);
  EXPECT_EQ(neq.length, 3u);
  EXPECT_TRUE(verify(Predicate::neq(3), neq).ok());
  const ZqMatrix upper = ZqMatrix::from_rows(5, {{1, 1, 1}, {0, 1, 1}, {0, 0, 1}});
  const Encoding gt = encode_from_matrix(Predicate::gt(3), upper, 5);
  EXPECT_EQ(gt.length, 3u);
  EXPECT_TRUE(verify(Predicate::gt(3), gt).ok());
  try {
    encode_from_matrix(Predicate::gt(3), jmi, 2);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::PatternMismatch);
  }
}

TEST(Encoders, TruthTable) {
  const Predicate p = Predicate::table(3, 4, {1, 0, 0, 1, 0, 1, 1, 0, 1, 1, 0, 0});
  for (u64 q : {2u, 6u, 30u}) EXPECT_TRUE(verify(p, encode_truth_table(p, factorize(q))).ok()) << q;
}

TEST(Encoders, VerifyReportsCorruption) {
  Encoding e = encode_gt_prime(3, 5);
  auto base = e.x;
  e.x = [base](u64 i) {
    Vec v = base(i);
    if (i == 2) v[2] = 0;
    return v;
  };
  const auto r = verify(Predicate::gt(3), e);
  EXPECT_EQ(r.checked_pairs, 9u);
  // Row x = 2 becomes all zero: only (2, 2) flips.
  ASSERT_EQ(r.mismatches.size(), 1u);
  EXPECT_EQ(r.mismatches[0].x, 2u);
  EXPECT_EQ(r.mismatches[0].y, 2u);
  EXPECT_FALSE(r.mismatches[0].expected);
}

TEST(Encoders, Builtin) {
  EXPECT_EQ(encode_builtin(Predicate::eq(4), 2).length, 4u);
  EXPECT_EQ(encode_builtin(Predicate::gt(6), 30).length, 2u);
  EXPECT_EQ(encode_builtin(Predicate::disj(4), 0, 2).q, 305u);
  EXPECT_THROW(encode_builtin(Predicate::mpoly(2, 1, 3), 5), Error);
}
