#pragma once

// Probabilistic inner product encodings from random hash tables: bucket
// hashing for EQ / NEQ, prefix hashing for GT. Hash functions are explicit
// uniform tables, so per-pair error probabilities have closed forms.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ipe/encoding.hpp"
#include "ipe/error.hpp"
#include "ipe/modmath.hpp"
#include "ipe/predicates.hpp"
#include "ipe/zqlinalg.hpp"

namespace ipe {

/// Error target as an exact fraction in (0, 1).
struct Eps {
  u64 num = 1;
  u64 den = 2;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  static Eps make(u64 num, u64 den) {
    if (den == 0 || num == 0 || num >= den) fail(ErrorKind::BadEps, "eps must lie strictly between 0 and 1");
    const u64 g = std::gcd(num, den);
    return {num / g, den / g};
  }

  /// Accepts "1/8" or a decimal such as "0.125".
  static Eps parse(const std::string& text) {
    auto digits_only = [](const std::string& s) {
      return !s.empty() && s.size() <= 18 && s.find_first_not_of("0123456789") == std::string::npos;
    };
    if (const auto slash = text.find('/'); slash != std::string::npos) {
      const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
      if (!digits_only(a) || !digits_only(b)) fail(ErrorKind::BadEps, "cannot parse eps '" + text + "'");
      return make(std::stoull(a), std::stoull(b));
    }
    const auto dot = text.find('.');
    const std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
    const std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if ((!whole.empty() && !digits_only(whole)) || (!frac.empty() && !digits_only(frac)) || frac.size() > 17 ||
        (whole.empty() && frac.empty()))
      fail(ErrorKind::BadEps, "cannot parse eps '" + text + "'");
    if (!whole.empty() && std::stoull(whole) != 0) fail(ErrorKind::BadEps, "eps must lie strictly between 0 and 1");
    u64 den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    return make(frac.empty() ? 0 : std::stoull(frac), den);
  }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

enum class ErrorSide { OneSidedOnEqual, TwoSided };
enum class RandomConstruction { BucketNEQ, BucketEQ, PrefixGT };

/// One lookup table per hash function, entries in [0, c).
using HashTables = std::vector<std::vector<u64>>;

struct ProbabilisticEncoding {
  RandomConstruction construction;
  u64 n = 0;
  u64 q = 2;
  u64 c = 1;  // buckets per hash function
  u64 m = 0;  // GT: bits per input
  std::size_t max_length = 0;
  Eps target_eps;
  ErrorSide error_side = ErrorSide::TwoSided;
  std::vector<u64> table_sizes;
  std::function<Encoding(const HashTables&)> build;

  Predicate predicate() const {
    switch (construction) {
      case RandomConstruction::BucketNEQ: return Predicate::neq(n);
      case RandomConstruction::BucketEQ: return Predicate::eq(n);
      case RandomConstruction::PrefixGT: return Predicate::gt(n);
    }
    fail(ErrorKind::BadParams, "unknown construction");
  }
};

namespace detail {

inline u64 splitmix64(u64 x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform value in [0, c) by rejection, independent of the standard
/// library's distribution implementation.
inline u64 uniform_below(std::mt19937_64& rng, u64 c) {
  const u64 limit = ~u64{0} - (~u64{0} % c);
  for (;;) {
    const u64 v = rng();
    if (v < limit) return v % c;
  }
}

inline void require_eps_params(u64 n, u64 q) {
  if (n < 1) fail(ErrorKind::BadParams, "n must be at least 1");
  if (q < 2) fail(ErrorKind::BadParams, "q must be at least 2");
}

inline u64 ceil_ratio(u64 a, const Eps& eps) {
  // ceil(a / eps) = ceil(a * den / num)
  return ceil_div(checked_mul(a, eps.den), eps.num);
}

}  // namespace detail

inline HashTables draw_tables(const ProbabilisticEncoding& pe, u64 seed) {
  std::mt19937_64 rng(seed);
  HashTables tables;
  tables.reserve(pe.table_sizes.size());
  for (u64 size : pe.table_sizes) {
    std::vector<u64> t(size);
    for (u64& v : t) v = detail::uniform_below(rng, pe.c);
    tables.push_back(std::move(t));
  }
  return tables;
}

inline Encoding sample(const ProbabilisticEncoding& pe, u64 seed) { return pe.build(draw_tables(pe, seed)); }

/// Seed of the t-th independent trial.
inline u64 trial_seed(u64 seed, u64 t) { return detail::splitmix64(seed ^ detail::splitmix64(t)); }

// --- Constructions ----------------------------------------------------

/// vx = e_{h(x)}, vy = e_{h(y)} with c buckets.
inline ProbabilisticEncoding rand_encode_neq_buckets(u64 n, u64 q, u64 c) {
  detail::require_eps_params(n, q);
  if (c < 1) fail(ErrorKind::BadParams, "needs at least one bucket");
  ProbabilisticEncoding pe{RandomConstruction::BucketNEQ, n, q, c, 0, c, Eps::make(1, std::max<u64>(c, 2)),
                           ErrorSide::OneSidedOnEqual, {n}, {}};
  pe.build = [n, q, c](const HashTables& h) {
    std::vector<Vec> xs(n, Vec(c, 0));
    for (u64 i = 0; i < n; ++i) xs[i][h[0][i]] = 1;
    auto ys = xs;
    return from_tables(q, c, std::move(xs), std::move(ys), "rand_neq");
  };
  return pe;
}

inline ProbabilisticEncoding rand_encode_neq(u64 n, u64 q, const Eps& eps) {
  auto pe = rand_encode_neq_buckets(n, q, detail::ceil_ratio(1, eps));
  pe.target_eps = eps;
  return pe;
}

/// vx = (1, e_{h(x)}), vy = (1, -e_{h(y)}) with c buckets.
inline ProbabilisticEncoding rand_encode_eq_buckets(u64 n, u64 q, u64 c) {
  detail::require_eps_params(n, q);
  if (c < 1) fail(ErrorKind::BadParams, "needs at least one bucket");
  ProbabilisticEncoding pe{RandomConstruction::BucketEQ, n, q, c, 0, c + 1, Eps::make(1, std::max<u64>(c, 2)),
                           ErrorSide::OneSidedOnEqual, {n}, {}};
  pe.build = [n, q, c](const HashTables& h) {
    std::vector<Vec> xs(n, Vec(c + 1, 0)), ys(n, Vec(c + 1, 0));
    for (u64 i = 0; i < n; ++i) {
      xs[i][0] = ys[i][0] = 1;
      xs[i][1 + h[0][i]] = 1;
      ys[i][1 + h[0][i]] = q - 1;
    }
    return from_tables(q, c + 1, std::move(xs), std::move(ys), "rand_eq");
  };
  return pe;
}

inline ProbabilisticEncoding rand_encode_eq(u64 n, u64 q, const Eps& eps) {
  auto pe = rand_encode_eq_buckets(n, q, detail::ceil_ratio(1, eps));
  pe.target_eps = eps;
  return pe;
}

/// Bits per GT input: ceil(log2 n).
inline u64 gt_bits(u64 n) {
  u64 m = 0;
  while (m < 64 && (u64{1} << m) < n) ++m;
  return m;
}

/// Prefix hashing for GT with m = ceil(log2 n) bits and c buckets per bit
/// position. Index x is written MSB first as x_1 ... x_m; block i of vx is
/// x_i e_{h_i(x_1..x_{i-1})}, block i of vy is (1 - y_i) e_{h_i(y_1..y_{i-1})},
/// and the leading coordinates are 1 and -1.
inline ProbabilisticEncoding rand_encode_gt_buckets(u64 n, u64 q, u64 c) {
  detail::require_eps_params(n, q);
  if (c < 1) fail(ErrorKind::BadParams, "needs at least one bucket");
  const u64 m = gt_bits(n);
  if (q <= m) fail(ErrorKind::QTooSmallForError, "needs q > ceil(log2 n) = " + std::to_string(m));
  const std::size_t length = 1 + checked_mul(m, c);
  std::vector<u64> sizes;
  for (u64 i = 0; i < m; ++i) sizes.push_back(u64{1} << i);
  ProbabilisticEncoding pe{RandomConstruction::PrefixGT, n, q, c, m, length, Eps::make(1, 2),
                           ErrorSide::TwoSided, sizes, {}};
  if (m > 0 && m < c) pe.target_eps = Eps::make(m, c);
  pe.build = [n, q, c, m, length](const HashTables& h) {
    std::vector<Vec> xs(n, Vec(length, 0)), ys(n, Vec(length, 0));
    for (u64 v = 0; v < n; ++v) {
      xs[v][0] = 1;
      ys[v][0] = q - 1;
      for (u64 i = 0; i < m; ++i) {
        const u64 bit = (v >> (m - 1 - i)) & 1;
        const u64 prefix = v >> (m - i);  // the leading i bits
        const std::size_t slot = 1 + i * c + h[i][prefix];
        if (bit == 1) xs[v][slot] = 1;
        if (bit == 0) ys[v][slot] = 1;
      }
    }
    return from_tables(q, length, std::move(xs), std::move(ys), "rand_gt");
  };
  return pe;
}

inline ProbabilisticEncoding rand_encode_gt(u64 n, u64 q, const Eps& eps) {
  const u64 m = gt_bits(n);
  auto pe = rand_encode_gt_buckets(n, q, std::max<u64>(1, detail::ceil_ratio(m, eps)));
  pe.target_eps = eps;
  return pe;
}

// --- Error evaluation ---------------------------------------------------

enum class ErrorMode { Exact, MonteCarlo };

struct ErrorReport {
  ErrorMode mode = ErrorMode::Exact;
  double worst_pair_error = 0;
  std::pair<u64, u64> worst_pair{0, 0};
  double avg_error = 0;  // over uniformly random (x, y)
  u64 trials = 0;
  u64 pairs = 0;
  double radius = 0;  // 3 sigma at the worst pair (Monte Carlo only)
};

/// Exact error probability of the pair (x, y) over the hash draw.
inline double exact_pair_error(const ProbabilisticEncoding& pe, u64 x, u64 y) {
  const double miss = 1.0 / static_cast<double>(pe.c);
  switch (pe.construction) {
    case RandomConstruction::BucketNEQ:
    case RandomConstruction::BucketEQ: return x == y ? 0.0 : miss;
    case RandomConstruction::PrefixGT: {
      if (x == y) return 0.0;
      // Positions after the first difference where x has 1 and y has 0 can
      // add a spurious collision term.
      const u64 diff = x ^ y;
      const u64 first = static_cast<u64>(63 - std::countl_zero(diff));  // bit index of the first difference
      const u64 below = first == 0 ? 0 : (x & ~y) & ((u64{1} << first) - 1);
      const auto r = static_cast<double>(std::popcount(below));
      if (x > y) return 1.0 - std::pow(1.0 - miss, r);
      return r == 0 ? 0.0 : r * miss * std::pow(1.0 - miss, r - 1);
    }
  }
  fail(ErrorKind::ExactUnavailable, "no closed form for this construction");
}

inline ErrorReport exact_error(const ProbabilisticEncoding& pe, u64 pair_cap = u64{1} << 26) {
  ErrorReport rep;
  rep.mode = ErrorMode::Exact;
  const u64 n = pe.n;
  if (pe.construction != RandomConstruction::PrefixGT) {
    const double miss = 1.0 / static_cast<double>(pe.c);
    rep.pairs = n * n;
    if (n > 1) {
      rep.worst_pair_error = miss;
      rep.worst_pair = {0, 1};
    }
    rep.avg_error = miss * static_cast<double>(n - 1) / static_cast<double>(n);
    return rep;
  }
  if (n > pair_cap / n) fail(ErrorKind::TooLarge, "too many pairs for exact GT evaluation");
  double total = 0;
  for (u64 x = 0; x < n; ++x)
    for (u64 y = 0; y < n; ++y) {
      const double e = exact_pair_error(pe, x, y);
      total += e;
      if (e > rep.worst_pair_error) {
        rep.worst_pair_error = e;
        rep.worst_pair = {x, y};
      }
    }
  rep.pairs = n * n;
  rep.avg_error = total / static_cast<double>(n * n);
  return rep;
}

/// Evenly spaced sample of at most `per_side` indices, always containing 0
/// and n - 1 and each sample's successor.
inline std::vector<u64> grid_points(u64 n, u64 per_side = 32) {
  std::vector<u64> pts;
  if (n <= per_side) {
    for (u64 v = 0; v < n; ++v) pts.push_back(v);
    return pts;
  }
  const u64 anchors = std::max<u64>(per_side / 2, 2);
  for (u64 a = 0; a < anchors; ++a) {
    const u64 v = (n - 2) * a / (anchors - 1);
    for (u64 w : {v, v + 1})
      if (pts.empty() || pts.back() < w) pts.push_back(w);
  }
  return pts;
}

inline std::vector<std::pair<u64, u64>> all_pairs(std::span<const u64> xs, std::span<const u64> ys) {
  std::vector<std::pair<u64, u64>> out;
  for (u64 x : xs)
    for (u64 y : ys) out.emplace_back(x, y);
  return out;
}

namespace detail {

using Sparse = std::vector<std::pair<std::size_t, u64>>;

inline Sparse sparse(const Vec& v) {
  Sparse s;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) s.emplace_back(i, v[i]);
  return s;
}

inline u64 sparse_dot(const Sparse& a, const Vec& b, u64 q) {
  u64 acc = 0;
  for (const auto& [i, v] : a) acc = add_mod(acc, mul_mod(v, b[i], q), q);
  return acc;
}

/// Error counts per pair for a run of hash tables.
struct ErrorTally {
  std::vector<u64> errors;
  u64 runs = 0;

  void add(const ProbabilisticEncoding& pe, const Predicate& p, const HashTables& h,
           std::span<const std::pair<u64, u64>> pairs) {
    const Encoding e = pe.build(h);
    if (errors.empty()) errors.assign(pairs.size(), 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto [x, y] = pairs[i];
      const bool zero = sparse_dot(sparse(e.x(x)), e.y(y), e.q) == 0;
      if (zero != p.eval(x, y)) ++errors[i];
    }
    ++runs;
  }
};

inline ErrorReport summarize(const ErrorTally& t, std::span<const std::pair<u64, u64>> pairs, ErrorMode mode) {
  ErrorReport rep;
  rep.mode = mode;
  rep.trials = t.runs;
  rep.pairs = pairs.size();
  u64 worst = 0, total = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    total += t.errors[i];
    if (t.errors[i] > worst) {
      worst = t.errors[i];
      rep.worst_pair = pairs[i];
    }
  }
  const double runs = static_cast<double>(t.runs);
  rep.worst_pair_error = static_cast<double>(worst) / runs;
  rep.avg_error = pairs.empty() ? 0.0 : static_cast<double>(total) / (runs * static_cast<double>(pairs.size()));
  if (mode == ErrorMode::MonteCarlo)
    rep.radius = 3.0 * std::sqrt(rep.worst_pair_error * (1.0 - rep.worst_pair_error) / runs);
  return rep;
}

}  // namespace detail

/// Empirical error over `trials` independent draws, on the given pairs.
/// avg_error averages over the listed pairs.
inline ErrorReport monte_carlo_error(const ProbabilisticEncoding& pe, std::span<const std::pair<u64, u64>> pairs,
                                     u64 trials, u64 seed) {
  if (trials == 0) fail(ErrorKind::BadParams, "needs at least one trial");
  const Predicate p = pe.predicate();
  const u64 n = pe.n;
  // Each trial builds the sampled vectors once and reuses them per pair.
  std::vector<u64> xs_needed(n, 0), ys_needed(n, 0);
  for (const auto& [x, y] : pairs) {
    if (x >= n || y >= n) fail(ErrorKind::DomainMismatch, "pair outside the domain");
    xs_needed[x] = ys_needed[y] = 1;
  }
  std::vector<u64> errors(pairs.size(), 0);
  std::vector<detail::Sparse> vx(n);
  std::vector<Vec> vy(n);
  for (u64 t = 0; t < trials; ++t) {
    const Encoding e = pe.build(draw_tables(pe, trial_seed(seed, t)));
    for (u64 v = 0; v < n; ++v) {
      if (xs_needed[v]) vx[v] = detail::sparse(e.x(v));
      if (ys_needed[v]) vy[v] = e.y(v);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto [x, y] = pairs[i];
      if ((detail::sparse_dot(vx[x], vy[y], e.q) == 0) != p.eval(x, y)) ++errors[i];
    }
  }
  detail::ErrorTally tally{std::move(errors), trials};
  return detail::summarize(tally, pairs, ErrorMode::MonteCarlo);
}

inline ErrorReport monte_carlo_error(const ProbabilisticEncoding& pe, u64 trials, u64 seed, u64 per_side = 32) {
  const auto pts = grid_points(pe.n, per_side);
  const auto pairs = all_pairs(pts, pts);
  return monte_carlo_error(pe, pairs, trials, seed);
}

/// Exact error by iterating over every possible hash table assignment.
/// Feasible only when c^(total table entries) <= cap.
inline ErrorReport enumerate_error(const ProbabilisticEncoding& pe, u64 cap = u64{1} << 20) {
  u64 entries = 0;
  for (u64 s : pe.table_sizes) entries = checked_add(entries, s);
  u64 total = 1;
  for (u64 i = 0; i < entries; ++i)
    if (__builtin_mul_overflow(total, pe.c, &total) || total > cap)
      fail(ErrorKind::CapExceeded, "hash space too large to enumerate");
  std::vector<u64> all(pe.n);
  std::iota(all.begin(), all.end(), u64{0});
  const auto pairs = all_pairs(all, all);
  const Predicate p = pe.predicate();
  HashTables h;
  for (u64 s : pe.table_sizes) h.emplace_back(s, 0);
  detail::ErrorTally tally;
  for (u64 a = 0; a < total; ++a) {
    tally.add(pe, p, h, pairs);
    // odometer over all table entries
    for (auto& table : h) {
      bool carry = true;
      for (u64& v : table) {
        if (++v < pe.c) {
          carry = false;
          break;
        }
        v = 0;
      }
      if (!carry) break;
    }
  }
  return detail::summarize(tally, pairs, ErrorMode::Exact);
}

inline ErrorReport estimate_error(const ProbabilisticEncoding& pe, ErrorMode mode, u64 trials, u64 seed) {
  if (mode == ErrorMode::Exact) return exact_error(pe);
  return monte_carlo_error(pe, trials, seed);
}

// --- Probabilistic rank ---------------------------------------------------

/// Largest rank over the support; an upper bound on the probabilistic
/// encoding length of any predicate the distribution computes.
inline std::size_t prob_rank_upper(std::span<const std::pair<ZqMatrix, double>> support) {
  std::size_t best = 0;
  for (const auto& [f, weight] : support) {
    (void)weight;
    best = std::max(best, rank_mod_p(f, f.modulus()));
  }
  return best;
}

/// Every (matrix, probability) pair of the construction's Gram matrices,
/// one per hash assignment; duplicates are kept.
inline std::vector<std::pair<ZqMatrix, double>> gram_support(const ProbabilisticEncoding& pe, u64 cap = u64{1} << 16) {
  u64 entries = 0;
  for (u64 s : pe.table_sizes) entries = checked_add(entries, s);
  u64 total = 1;
  for (u64 i = 0; i < entries; ++i)
    if (__builtin_mul_overflow(total, pe.c, &total) || total > cap)
      fail(ErrorKind::CapExceeded, "hash space too large to enumerate");
  std::vector<std::pair<ZqMatrix, double>> out;
  HashTables h;
  for (u64 s : pe.table_sizes) h.emplace_back(s, 0);
  for (u64 a = 0; a < total; ++a) {
    out.emplace_back(gram_matrix(pe.build(h)), 1.0 / static_cast<double>(total));
    for (auto& table : h) {
      bool carry = true;
      for (u64& v : table) {
        if (++v < pe.c) {
          carry = false;
          break;
        }
        v = 0;
      }
      if (!carry) break;
    }
  }
  return out;
}

}  // namespace ipe
