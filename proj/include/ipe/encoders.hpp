#pragma once

// Deterministic inner product encodings. Every construction returns an
// Encoding over the canonical domains of the matching Predicate; negative
// constants are stored as their residues q - v.

#include <bit>
#include <string>
#include <vector>

#include "ipe/encoding.hpp"
#include "ipe/error.hpp"
#include "ipe/modmath.hpp"
#include "ipe/predicates.hpp"
#include "ipe/reductions.hpp"
#include "ipe/zqlinalg.hpp"

namespace ipe {

namespace detail {

inline Encoding lazy_encoding(u64 q, std::size_t length, u64 x_count, u64 y_count, std::function<Vec(u64)> x,
                              std::function<Vec(u64)> y, std::string provenance) {
  Encoding e;
  e.q = q;
  e.factors = distinct_prime_factors(q);
  e.length = length;
  e.x_count = x_count;
  e.y_count = y_count;
  e.x = std::move(x);
  e.y = std::move(y);
  e.provenance = std::move(provenance);
  return e;
}

inline void require_n(u64 n) {
  if (n < 1) fail(ErrorKind::BadParams, "n must be at least 1");
}

/// Product of the primes whose exponent bit is set.
inline u64 prime_product(std::span<const u64> primes, u64 exponent_mask, u64 q) {
  u64 v = 1 % q;
  for (std::size_t j = 0; j < primes.size(); ++j)
    if ((exponent_mask >> j) & 1) v = mul_mod(v, primes[j], q);
  return v;
}

/// Bits (i*k .. i*k+k-1) of a padded n-bit mask.
inline u64 block_bits(u64 mask, u64 block, u64 k) { return (mask >> (block * k)) & full_mask(k); }

}  // namespace detail

// --- Equality ---------------------------------------------------------

/// q = 2, length n: vx = e_x, vy = 1^n - e_y.
inline Encoding encode_eq_mod2(u64 n) {
  detail::require_n(n);
  auto x = [n](u64 i) {
    Vec v(n, 0);
    v[i] = 1;
    return v;
  };
  auto y = [n](u64 j) {
    Vec v(n, 1);
    v[j] = 0;
    return v;
  };
  return detail::lazy_encoding(2, n, n, n, x, y, "eq_mod2");
}

/// q >= n, length 2: vx = (1, x), vy = (y, -1), so <vx,vy> = y - x.
inline Encoding encode_eq_large_q(u64 n, u64 q) {
  detail::require_n(n);
  if (q < n || q < 2) fail(ErrorKind::QTooSmall, "needs q >= n");
  auto x = [q](u64 i) { return Vec{1, (i + 1) % q}; };
  auto y = [q](u64 j) { return Vec{(j + 1) % q, q - 1}; };
  return detail::lazy_encoding(q, 2, n, n, x, y, "eq_large_q");
}

// --- Index ------------------------------------------------------------

/// Exponent convention for the block INDEX construction.
enum class IndexExponent {
  Complemented,  // vx_i = prod_j p_j^{1 - X_ij}: encodes INDEX
  AsPrinted,     // vx_i = prod_j p_j^{X_ij}: vanishes exactly when x_y = 1
};

/// Block construction of length ceil(n/k) for q = p_1 ... p_k. Data bits
/// are padded with 1 up to a multiple of k; padded positions are never
/// indexed.
inline Encoding encode_index(u64 n, const Modulus& m, IndexExponent exponent = IndexExponent::Complemented) {
  detail::require_n(n);
  const u64 k = m.k();
  if (k > n) fail(ErrorKind::KExceedsN, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  if (n > kMaxSetUniverse) fail(ErrorKind::BadParams, "n too large for bitstring indexing");
  const u64 blocks = ceil_div(n, k);
  const u64 padded = blocks * k;
  const u64 pad_bits = detail::full_mask(padded) & ~detail::full_mask(n);
  const u64 q = m.q();
  const std::vector<u64> primes(m.factors().begin(), m.factors().end());
  const bool complemented = exponent == IndexExponent::Complemented;
  auto x = [=](u64 data) {
    const u64 bits = data | pad_bits;
    Vec v(blocks);
    for (u64 i = 0; i < blocks; ++i) {
      const u64 block = detail::block_bits(bits, i, k);
      v[i] = detail::prime_product(primes, complemented ? (~block & detail::full_mask(k)) : block, q);
    }
    return v;
  };
  auto y = [=](u64 position) {
    Vec v(blocks, 0);
    v[position / k] = q / primes[position % k];
    return v;
  };
  return detail::lazy_encoding(q, blocks, u64{1} << n, n, x, y,
                               complemented ? "index_block" : "index_block_as_printed");
}

/// k = n warm-up, length 1: vx = prod_i p_i^{1 - x_i}, vy = q / p_y.
inline Encoding encode_index_warmup(u64 n, const Modulus& m) {
  detail::require_n(n);
  if (m.k() != n) fail(ErrorKind::BadK, "warm-up needs exactly n distinct prime factors");
  const u64 q = m.q();
  const std::vector<u64> primes(m.factors().begin(), m.factors().end());
  auto x = [=](u64 data) { return Vec{detail::prime_product(primes, ~data & detail::full_mask(n), q)}; };
  auto y = [=](u64 position) { return Vec{q / primes[position]}; };
  return detail::lazy_encoding(q, 1, u64{1} << n, n, x, y, "index_warmup");
}

// --- Inequality ---------------------------------------------------------

/// NEQ_n through INDEX_n => NEQ_n, length ceil(n/k).
inline Encoding encode_neq(u64 n, const Modulus& m) {
  ReductionArgs args;
  args.n = n;
  return apply_reduction(builtin_reduction("INDEX=>NEQ", args), encode_index(n, m));
}

// --- Disjointness -----------------------------------------------------

/// p_1 is the least prime above n (n padded to a multiple of k); each later
/// p_j is the least prime above (n/k) * (p_1 ... p_{j-1})^2 that is
/// 1 modulo p_1 ... p_{j-1}.
inline std::vector<u64> disj_primes(u64 n, u64 k) {
  if (k < 1 || k > n) fail(ErrorKind::BadParams, "DISJ needs 1 <= k <= n");
  const u64 blocks = ceil_div(n, k);
  const u64 padded = blocks * k;
  std::vector<u64> primes{next_prime_above(padded)};
  u64 product = primes[0];
  for (u64 j = 2; j <= k; ++j) {
    try {
      const u64 bound = checked_mul(blocks, checked_mul(product, product));
      const u64 p = dirichlet_prime(product, bound);
      primes.push_back(p);
      product = checked_mul(product, p);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Overflow) throw;
      fail(ErrorKind::Overflow, "DISJ prime tower for n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                                    " leaves 64 bits while choosing p_" + std::to_string(j));
    }
  }
  return primes;
}

struct DisjointnessEncoding {
  Modulus modulus;
  Encoding encoding;
};

/// Length ceil(n/k) over the constructed modulus; vx_i = prod_j
/// p_j^{1 - X_ij}, vy_i = prod_j p_j^{1 - Y_ij}. Set bits are padded with 0.
inline DisjointnessEncoding encode_disj(u64 n, u64 k) {
  detail::require_n(n);
  if (n > kMaxSetUniverse) fail(ErrorKind::BadParams, "n too large for subset indexing");
  const Modulus m = Modulus::from_primes(disj_primes(n, k));
  const u64 blocks = ceil_div(n, k);
  const u64 q = m.q();
  const std::vector<u64> primes(m.factors().begin(), m.factors().end());
  const Domain sets = Domain::subsets(n);
  auto side = [=](u64 index) {
    const u64 mask = sets.subset_at(index);
    Vec v(blocks);
    for (u64 i = 0; i < blocks; ++i)
      v[i] = detail::prime_product(primes, ~detail::block_bits(mask, i, k) & detail::full_mask(k), q);
    return v;
  };
  return {m, detail::lazy_encoding(q, blocks, sets.size(), sets.size(), side, side, "disj")};
}

// --- Greater than -----------------------------------------------------

/// length n: vx = e_x, vy = sum_{i <= y} e_i, so <vx,vy> = [x <= y].
inline Encoding encode_gt_prime(u64 n, u64 q) {
  detail::require_n(n);
  if (q < 2) fail(ErrorKind::BadParams, "q must be at least 2");
  auto x = [n](u64 i) {
    Vec v(n, 0);
    v[i] = 1;
    return v;
  };
  auto y = [n](u64 j) {
    Vec v(n, 0);
    for (u64 i = 0; i <= j; ++i) v[i] = 1;
    return v;
  };
  return detail::lazy_encoding(q, n, n, n, x, y, "gt_prime");
}

/// k = n, length 1: vx = prod_{i < x} p_i, vy = prod_{i > y} p_i.
inline Encoding encode_gt_kprimes(u64 n, const Modulus& m) {
  detail::require_n(n);
  if (m.k() != n) fail(ErrorKind::BadK, "needs exactly n distinct prime factors");
  const u64 q = m.q();
  const std::vector<u64> primes(m.factors().begin(), m.factors().end());
  auto x = [=](u64 i) { return Vec{detail::prime_product(primes, detail::full_mask(i), q)}; };
  auto y = [=](u64 j) { return Vec{detail::prime_product(primes, detail::full_mask(n) & ~detail::full_mask(j + 1), q)}; };
  return detail::lazy_encoding(q, 1, n, n, x, y, "gt_kprimes");
}

/// Shortest builtin GT encoding for q = p_1 ... p_k.
inline Encoding encode_gt(u64 n, const Modulus& m) {
  if (m.is_prime()) return encode_gt_prime(n, m.q());
  if (m.k() == n) return encode_gt_kprimes(n, m);
  ReductionArgs args;
  args.n = n;
  return apply_reduction(builtin_reduction("INDEX=>GT", args), encode_index(n, m));
}

// --- Exact threshold --------------------------------------------------

enum class EthrForm { Auto, General };

/// General form (length n+1): (chi(S), 1) . (chi(T), -t). With Auto the
/// length-2 form is used for t = n and the length-3 form for t = n-1 when
/// q >= n + 2.
inline Encoding encode_ethr(u64 n, u64 t, u64 q, EthrForm form = EthrForm::Auto) {
  const Predicate pred = Predicate::ethr(n, t);
  const Domain sets = pred.x_domain();
  const u64 all = detail::full_mask(n);
  if (form == EthrForm::Auto && t == n) {
    if (q < 2) fail(ErrorKind::QTooSmall, "needs q >= 2");
    auto x = [=](u64 s) { return Vec{1, sets.subset_at(s) == all ? u64{1} : 0}; };
    auto y = [=](u64 s) { return Vec{1, sets.subset_at(s) == all ? q - 1 : 0}; };
    return detail::lazy_encoding(q, 2, sets.size(), sets.size(), x, y, "ethr_full");
  }
  if (form == EthrForm::Auto && n >= 2 && t == n - 1 && q >= n + 2) {
    // Missing element i of a co-singleton set, or 0 when |S| < n - 1.
    auto missing = [=](u64 mask) -> u64 {
      const u64 gap = all & ~mask;
      return std::popcount(gap) == 1 ? static_cast<u64>(std::countr_zero(gap)) + 1 : 0;
    };
    auto x = [=](u64 s) {
      const u64 mask = sets.subset_at(s);
      if (mask == all) return Vec{1, 0, 0};
      if (const u64 i = missing(mask)) return Vec{0, i, 1};
      return Vec{1, q - 1, 1};
    };
    auto y = [=](u64 s) {
      const u64 mask = sets.subset_at(s);
      if (mask == all) return Vec{1, 0, 0};
      if (const u64 i = missing(mask)) return Vec{0, 1, q - i};
      return Vec{1, 1, 1};
    };
    return detail::lazy_encoding(q, 3, sets.size(), sets.size(), x, y, "ethr_cosingleton");
  }
  // |S cap T| - t ranges over [-t, n - t]; all nonzero values must stay
  // nonzero mod q.
  if (q < n || q <= t) fail(ErrorKind::QTooSmall, "general ETHR form needs q >= n and q > t");
  auto side = [=](u64 s, u64 last) {
    const u64 mask = sets.subset_at(s);
    Vec v(n + 1);
    for (u64 i = 0; i < n; ++i) v[i] = (mask >> i) & 1;
    v[n] = last;
    return v;
  };
  auto x = [=](u64 s) { return side(s, 1); };
  auto y = [=](u64 s) { return side(s, neg_mod(t % q, q)); };
  return detail::lazy_encoding(q, n + 1, sets.size(), sets.size(), x, y, "ethr_general");
}

// --- Multilinear polynomials ----------------------------------------------

/// Monomial masks X_S with |S| <= d in Subsets order.
inline std::vector<u64> monomial_masks(u64 n, unsigned d) {
  const u64 count = binomial_prefix(n, d);
  std::vector<u64> masks;
  masks.reserve(count);
  for (u64 j = 0; j < count; ++j) masks.push_back(Domain::subset_by_rank(n, j));
  return masks;
}

/// (X_S(x))_S for the monomials in order.
inline Vec monomial_vector(std::span<const u64> x, std::span<const u64> masks, u64 q) {
  Vec v;
  v.reserve(masks.size());
  for (u64 mask : masks) {
    u64 term = 1 % q;
    for (u64 rest = mask; rest != 0; rest &= rest - 1)
      term = mul_mod(term, x[static_cast<std::size_t>(std::countr_zero(rest))] % q, q);
    v.push_back(term);
  }
  return v;
}

inline Vec coefficient_vector(const MultilinearPoly& p, std::span<const u64> masks) {
  Vec v;
  v.reserve(masks.size());
  for (u64 mask : masks) v.push_back(p.coefficient(mask));
  return v;
}

/// vx_S = X_S(x), vy_S = a_S; <vx,vy> = p(x). Length C(n, <= d).
inline Encoding encode_mpoly(u64 n, unsigned d, u64 q, u64 cap = kDefaultCellCap) {
  const Predicate pred = Predicate::mpoly(n, d, q);
  const u64 length = binomial_prefix(n, d);
  if (length > cap) fail(ErrorKind::TooLarge, "C(n,<=d) = " + std::to_string(length) + " exceeds the cap");
  const Domain points = pred.x_domain();
  const Domain polys = pred.y_domain();
  auto masks = std::make_shared<const std::vector<u64>>(monomial_masks(n, d));
  auto x = [=](u64 i) { return monomial_vector(points.vector_at(i), *masks, q); };
  auto y = [=](u64 j) { return coefficient_vector(polys.poly_at(j), *masks); };
  return detail::lazy_encoding(q, length, points.size(), polys.size(), x, y, "mpoly");
}

// --- Threshold --------------------------------------------------------

/// Encodes p_T(chi(S)) = prod_{j=t..n} (|S cap T| - j) through the
/// multilinear expansion of degree n-t+1; length C(n, <= n-t+1). Every prime
/// factor of q must exceed n so that a product of nonzero factors
/// |s - j| <= n stays nonzero.
inline Encoding encode_thr(u64 n, u64 t, u64 q, u64 cap = kDefaultCellCap) {
  const Predicate pred = Predicate::thr(n, t);
  const Modulus m = factorize(q);
  if (m.factors().front() <= n)
    fail(ErrorKind::QTooSmall, "every prime factor of q must exceed n = " + std::to_string(n));
  const auto degree = static_cast<unsigned>(n - t + 1);
  const u64 length = binomial_prefix(n, degree);
  if (length > cap) fail(ErrorKind::TooLarge, "C(n,<=n-t+1) = " + std::to_string(length) + " exceeds the cap");
  const Domain sets = pred.x_domain();
  auto masks = std::make_shared<const std::vector<u64>>(monomial_masks(n, degree));
  auto x = [=](u64 s) {
    const u64 mask = sets.subset_at(s);
    Vec chi(n);
    for (u64 i = 0; i < n; ++i) chi[i] = (mask >> i) & 1;
    return monomial_vector(chi, *masks, q);
  };
  auto y = [=](u64 s) { return coefficient_vector(threshold_poly(n, t, sets.subset_at(s), q), *masks); };
  return detail::lazy_encoding(q, length, sets.size(), sets.size(), x, y, "thr_poly");
}

// --- Disjunction of equality tests ------------------------------------------

/// vx_S = prod_{i in S} x_i, vy_S = prod_{i not in S} (-y_i); the inner
/// product is prod_i (x_i - y_i). Requires q prime: for composite q a
/// product of nonzero differences can vanish (2 * 3 = 0 mod 6).
inline Encoding encode_oreq(u64 n, u64 q, u64 cap = kDefaultCellCap) {
  const Predicate pred = Predicate::oreq(n, q);
  if (!is_prime(q)) fail(ErrorKind::NotPrime, "OR_EQ expansion needs a prime modulus");
  if (n > kMaxSetUniverse || (u64{1} << n) > cap) fail(ErrorKind::TooLarge, "2^n exceeds the cap");
  const Domain points = pred.x_domain();
  auto masks = std::make_shared<const std::vector<u64>>(monomial_masks(n, static_cast<unsigned>(n)));
  auto x = [=](u64 i) { return monomial_vector(points.vector_at(i), *masks, q); };
  auto y = [=](u64 j) { return coefficient_vector(disagreement_poly(points.vector_at(j), q), *masks); };
  return detail::lazy_encoding(q, masks->size(), points.size(), points.size(), x, y, "or_eq_poly");
}

// --- Generic constructions --------------------------------------------

/// Encoding read off a rank factorization F = U V over Z_p, without
/// checking F against any predicate: x -> row x of U, y -> column y of V.
inline Encoding encoding_from_factorization(const ZqMatrix& f, u64 p) {
  const RankFactorization rf = factor_rank(f, p);
  std::vector<Vec> xs(f.rows()), ys(f.cols());
  for (std::size_t i = 0; i < f.rows(); ++i) xs[i].assign(rf.u.row(i).begin(), rf.u.row(i).end());
  for (std::size_t j = 0; j < f.cols(); ++j) {
    ys[j].resize(rf.rank);
    for (std::size_t r = 0; r < rf.rank; ++r) ys[j][r] = rf.v.at(r, j);
  }
  return from_tables(p, rf.rank, std::move(xs), std::move(ys), "rank_factorization");
}

/// Length rank_p(F) encoding of P from a matrix representing it mod p.
inline Encoding encode_from_matrix(const Predicate& pred, const ZqMatrix& f, u64 p) {
  detail::require_prime(p);
  const ZeroPattern z = zero_pattern(pred);
  if (f.rows() != z.rows || f.cols() != z.cols)
    fail(ErrorKind::PatternMismatch, "matrix shape differs from the domains of " + pred.name());
  for (u64 r = 0; r < z.rows; ++r)
    for (u64 c = 0; c < z.cols; ++c)
      if ((f.at(r, c) % p == 0) != z.zero(r, c))
        fail(ErrorKind::PatternMismatch, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                             ") does not follow the zero pattern of " + pred.name());
  Encoding e = encoding_from_factorization(f, p);
  e.provenance = "from_matrix";
  return e;
}

/// min(|X|,|Y|)/k encoding of any predicate through its truth table.
inline Encoding encode_truth_table(const Predicate& pred, const Modulus& m) {
  ReductionArgs args;
  args.predicate = pred;
  const Reduction r = builtin_reduction("INDEX=>ANY", args);
  return apply_reduction(r, encode_index(r.target.n(), m));
}

/// Default construction for a builtin predicate modulo q. DISJ picks its
/// own modulus from k (q is then ignored); every other family needs q.
inline Encoding encode_builtin(const Predicate& p, u64 q, u64 k = 1, EthrForm form = EthrForm::Auto) {
  const u64 n = p.n();
  switch (p.id()) {
    case PredicateId::EQ:
      if (q == 2) return encode_eq_mod2(n);
      return encode_eq_large_q(n, q);
    case PredicateId::GT: return encode_gt(n, factorize(q));
    case PredicateId::NEQ: return encode_neq(n, factorize(q));
    case PredicateId::INDEX: return encode_index(n, factorize(q));
    case PredicateId::DISJ: return encode_disj(n, k).encoding;
    case PredicateId::ETHR: return encode_ethr(n, p.t(), q, form);
    case PredicateId::THR: return encode_thr(n, p.t(), q);
    case PredicateId::MPOLY:
      if (q != p.q()) fail(ErrorKind::ModulusMismatch, "MPOLY is encoded modulo its own q");
      return encode_mpoly(n, p.d(), q);
    case PredicateId::OR_EQ:
      if (q != p.q()) fail(ErrorKind::ModulusMismatch, "OR_EQ is encoded modulo its own q");
      return encode_oreq(n, q);
    case PredicateId::TABLE: return encode_truth_table(p, factorize(q));
  }
  fail(ErrorKind::BadParams, "unknown predicate");
}

}  // namespace ipe
