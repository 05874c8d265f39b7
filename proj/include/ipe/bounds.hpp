#pragma once

// Lower-bound certificates: exact minimum rank on tiny patterns, the
// triangular and diagonal pigeonhole bounds, lifting through reductions,
// and the counting bound for multilinear polynomials.

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ipe/error.hpp"
#include "ipe/modmath.hpp"
#include "ipe/predicates.hpp"
#include "ipe/reductions.hpp"
#include "ipe/zqlinalg.hpp"

namespace ipe {

// --- Pattern helpers --------------------------------------------------

/// The pattern as a TABLE predicate (forced zero = true).
inline Predicate pattern_predicate(const ZeroPattern& z) { return Predicate::table(z.rows, z.cols, z.forced_zero); }

inline ZeroPattern transpose(const ZeroPattern& z) {
  ZeroPattern t{z.cols, z.rows, std::vector<std::uint8_t>(z.forced_zero.size())};
  for (u64 r = 0; r < z.rows; ++r)
    for (u64 c = 0; c < z.cols; ++c) t.forced_zero[c * z.rows + r] = z.forced_zero[r * z.cols + c];
  return t;
}

/// True iff, under the witness orders, the leading block is forced zero
/// strictly below the diagonal and forced nonzero on it.
inline bool pattern_is_triangular(const ZeroPattern& z, const TriangularWitness& w) {
  if (!is_permutation_of(w.row_order, z.rows) || !is_permutation_of(w.col_order, z.cols)) return false;
  if (w.diag_len > z.rows || w.diag_len > z.cols) return false;
  for (std::size_t i = 0; i < w.diag_len; ++i) {
    if (z.zero(w.row_order[i], w.col_order[i])) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (!z.zero(w.row_order[i], w.col_order[j])) return false;
  }
  return true;
}

namespace detail {

/// Completes chosen prefixes of rows / cols into full permutations.
inline std::vector<std::size_t> complete_order(std::vector<std::size_t> prefix, std::size_t n) {
  std::vector<char> used(n, 0);
  for (std::size_t v : prefix) used[v] = 1;
  for (std::size_t v = 0; v < n; ++v)
    if (!used[v]) prefix.push_back(v);
  return prefix;
}

/// Greedy chain starting from `first_row`: each new row must be forced
/// zero on every chosen column and forced nonzero on some new column.
inline TriangularWitness greedy_chain(const ZeroPattern& z, std::size_t first_row) {
  std::vector<std::size_t> rows, cols;
  std::vector<char> row_used(z.rows, 0), col_used(z.cols, 0);
  auto try_row = [&](std::size_t r) {
    if (row_used[r]) return false;
    for (std::size_t c : cols)
      if (!z.zero(r, c)) return false;
    for (std::size_t c = 0; c < z.cols; ++c)
      if (!col_used[c] && !z.zero(r, c)) {
        rows.push_back(r);
        cols.push_back(c);
        row_used[r] = col_used[c] = 1;
        return true;
      }
    return false;
  };
  try_row(first_row);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t r = 0; r < z.rows && !grew; ++r) grew = try_row(r);
  }
  TriangularWitness w;
  w.diag_len = rows.size();
  w.row_order = complete_order(std::move(rows), z.rows);
  w.col_order = complete_order(std::move(cols), z.cols);
  return w;
}

inline TriangularWitness swap_sides(TriangularWitness w) {
  // A chain in the transpose, read back: lower-zero there is upper-zero
  // here, so reverse the chosen prefix to restore lower-zero form.
  std::reverse(w.row_order.begin(), w.row_order.begin() + static_cast<std::ptrdiff_t>(w.diag_len));
  std::reverse(w.col_order.begin(), w.col_order.begin() + static_cast<std::ptrdiff_t>(w.diag_len));
  std::swap(w.row_order, w.col_order);
  return w;
}

}  // namespace detail

/// Longest triangular chain found greedily from every starting row of the
/// pattern and of its transpose. Its length lower-bounds the rank of every
/// matrix following the pattern over any field.
inline TriangularWitness find_triangular_witness(const ZeroPattern& z) {
  TriangularWitness best = identity_witness(z.rows, z.cols);
  best.diag_len = 0;
  for (std::size_t r = 0; r < z.rows; ++r) {
    auto w = detail::greedy_chain(z, r);
    if (w.diag_len > best.diag_len) best = std::move(w);
  }
  const ZeroPattern t = transpose(z);
  for (std::size_t r = 0; r < t.rows; ++r) {
    auto w = detail::greedy_chain(t, r);
    if (w.diag_len > best.diag_len) best = detail::swap_sides(std::move(w));
  }
  return best;
}

// --- Exact minimum rank -----------------------------------------------------

struct OracleOptions {
  u64 max_free_cells = 64;
  u64 max_assignments = u64{1} << 24;
};

struct MinRankResult {
  u64 rank = 0;
  ZqMatrix matrix{1, 1, 2};  // a minimizer
  u64 free_cells = 0;
  u64 assignments = 0;       // assignments actually examined
  u64 lower_bound = 0;       // triangular bound used for early exit
};

/// Exhaustive minimum of rank_p(F) over matrices following z. Rows and
/// columns may be rescaled freely, so the cells of a spanning forest of the
/// nonzero cells are fixed to 1 and the rest range over Z_p \ {0}.
inline MinRankResult min_rank_search(const ZeroPattern& z, u64 p, const OracleOptions& opts = {}) {
  detail::require_prime(p);
  const std::size_t rows = z.rows, cols = z.cols;
  if (rows == 0 || cols == 0) fail(ErrorKind::BadParams, "pattern must have positive dimensions");

  std::vector<std::size_t> parent(rows + cols);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<std::size_t> free;  // cell positions
  std::vector<u64> base(rows * cols, 0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (z.zero(r, c)) continue;
      base[r * cols + c] = 1;
      const std::size_t a = find(r), b = find(rows + c);
      if (a != b)
        parent[a] = b;
      else
        free.push_back(r * cols + c);
    }

  MinRankResult result;
  result.free_cells = free.size();
  if (free.size() > opts.max_free_cells)
    fail(ErrorKind::CapExceeded, std::to_string(free.size()) + " free cells exceed the cap of " +
                                     std::to_string(opts.max_free_cells));
  u64 total = 1;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (__builtin_mul_overflow(total, p - 1, &total) || total > opts.max_assignments)
      fail(ErrorKind::CapExceeded, "(p-1)^" + std::to_string(free.size()) + " assignments exceed the cap of " +
                                       std::to_string(opts.max_assignments));
  }

  result.lower_bound = find_triangular_witness(z).diag_len;
  result.rank = ~u64{0};
  std::vector<u64> digits(free.size(), 1);
  std::vector<u64> cells = base;
  for (u64 a = 0; a < total; ++a) {
    for (std::size_t i = 0; i < free.size(); ++i) cells[free[i]] = digits[i];
    auto work = cells;
    const u64 r = detail::rref(work, rows, cols, p).size();
    ++result.assignments;
    if (r < result.rank) {
      result.rank = r;
      result.matrix = ZqMatrix(rows, cols, p, cells);
      if (r <= result.lower_bound) break;
    }
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (++digits[i] < p) break;
      digits[i] = 1;
    }
  }
  return result;
}

inline u64 min_rank_oracle(const ZeroPattern& z, u64 p, const OracleOptions& opts = {}) {
  return min_rank_search(z, p, opts).rank;
}

// --- Certificates -----------------------------------------------------

enum class BoundMethod { ExactMinRank, TriangularPigeonhole, DiagonalNonzero, ReductionLift, CountingMPOLY };

inline constexpr std::string_view to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::ExactMinRank: return "ExactMinRank";
    case BoundMethod::TriangularPigeonhole: return "TriangularPigeonhole";
    case BoundMethod::DiagonalNonzero: return "DiagonalNonzero";
    case BoundMethod::ReductionLift: return "ReductionLift";
    case BoundMethod::CountingMPOLY: return "CountingMPOLY";
  }
  return "?";
}

inline BoundMethod bound_method_from_string(std::string_view s) {
  for (auto m : {BoundMethod::ExactMinRank, BoundMethod::TriangularPigeonhole, BoundMethod::DiagonalNonzero,
                 BoundMethod::ReductionLift, BoundMethod::CountingMPOLY})
    if (to_string(m) == s) return m;
  fail(ErrorKind::Parse, "unknown bound method '" + std::string(s) + "'");
}

struct MinRankWitness {
  u64 prime = 0;
  ZqMatrix matrix{1, 1, 2};  // attains the bound
};

/// Row r is paired with column col_of_row[r]; those cells are the only
/// forced-nonzero ones.
struct DiagonalWitness {
  std::vector<std::size_t> col_of_row;
};

struct Certificate;

struct LiftWitness {
  std::string reduction;
  ReductionArgs args;
  std::shared_ptr<const Certificate> inner;  // certificate for the reduction's source
};

struct CountingWitness {
  u64 n = 0;
  unsigned d = 0;
  u64 q = 0;
};

using Witness = std::variant<MinRankWitness, TriangularWitness, DiagonalWitness, LiftWitness, CountingWitness>;

struct Certificate {
  Predicate predicate;
  Modulus modulus;
  u64 bound;
  BoundMethod method;
  Witness witness;
};

inline u64 pigeonhole_bound(u64 n, const Modulus& m) { return ceil_div(n, m.k()); }

/// Exact DI(P, p) at prime p, from the oracle.
inline Certificate exact_bound(const Predicate& pred, const Modulus& m, const OracleOptions& opts = {}) {
  if (!m.is_prime()) fail(ErrorKind::NotPrime, "exact minimum rank needs a prime modulus");
  auto res = min_rank_search(zero_pattern(pred), m.q(), opts);
  return {pred, m, res.rank, BoundMethod::ExactMinRank, MinRankWitness{m.q(), std::move(res.matrix)}};
}

/// ceil(n/k) from a triangular layout of the pattern. The certificate's
/// predicate is the pattern itself as a TABLE.
inline Certificate triangular_bound(const ZeroPattern& z, const Modulus& m, const TriangularWitness& w) {
  if (!pattern_is_triangular(z, w))
    fail(ErrorKind::NotTriangularPattern, "pattern is not triangular under the given orders");
  return {pattern_predicate(z), m, pigeonhole_bound(w.diag_len, m), BoundMethod::TriangularPigeonhole, w};
}

inline Certificate triangular_bound(const ZeroPattern& z, const Modulus& m, std::vector<std::size_t> row_order,
                                    std::vector<std::size_t> col_order) {
  TriangularWitness w{std::move(row_order), std::move(col_order), 0};
  w.diag_len = std::min(w.row_order.size(), w.col_order.size());
  return triangular_bound(z, m, w);
}

namespace detail {

inline std::optional<DiagonalWitness> find_diagonal(const ZeroPattern& z) {
  if (z.rows != z.cols) return std::nullopt;
  DiagonalWitness w;
  std::vector<char> taken(z.cols, 0);
  for (u64 r = 0; r < z.rows; ++r) {
    std::optional<std::size_t> found;
    for (u64 c = 0; c < z.cols; ++c) {
      if (z.zero(r, c)) continue;
      if (found) return std::nullopt;
      found = c;
    }
    if (!found || taken[*found]) return std::nullopt;
    taken[*found] = 1;
    w.col_of_row.push_back(*found);
  }
  return w;
}

}  // namespace detail

/// ceil(n/k) for a pattern whose forced-nonzero cells form a permutation.
inline Certificate diagonal_bound(const ZeroPattern& z, const Modulus& m) {
  auto w = detail::find_diagonal(z);
  if (!w) fail(ErrorKind::NotDiagonalPattern, "forced-nonzero cells do not form a square permutation");
  return {pattern_predicate(z), m, pigeonhole_bound(z.rows, m), BoundMethod::DiagonalNonzero, std::move(*w)};
}

/// Carries c (a bound for r.source) to r.target after checking the
/// reduction exhaustively.
inline Certificate lift_bound(const Reduction& r, const Certificate& c, u64 cap = kDefaultCellCap) {
  if (!(c.predicate == r.source))
    fail(ErrorKind::UnverifiedReduction, "certificate is for " + c.predicate.name() + ", reduction solves " +
                                             r.source.name());
  bool ok = false;
  try {
    ok = verify_reduction(r, cap);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TooLarge) throw;
    fail(ErrorKind::UnverifiedReduction, r.name + " is too large to verify: " + e.what());
  }
  if (!ok) fail(ErrorKind::UnverifiedReduction, r.name + " does not satisfy its defining identity");
  return {r.target, c.modulus, c.bound, BoundMethod::ReductionLift,
          LiftWitness{r.name, r.args, std::make_shared<const Certificate>(c)}};
}

/// C(n, <= d) for MPOLY^{d,q}_n modulo the prime q.
inline Certificate mpoly_counting_bound(u64 n, unsigned d, u64 q) {
  detail::require_prime(q);
  return {Predicate::mpoly(n, d, q), factorize(q), binomial_prefix(n, d), BoundMethod::CountingMPOLY,
          CountingWitness{n, d, q}};
}

namespace detail {

inline Certificate relabel(Certificate c, const Predicate& p) {
  c.predicate = p;
  return c;
}

inline Certificate lift_chain(const Certificate& base, std::initializer_list<Reduction> chain, u64 cap) {
  Certificate c = base;
  for (const Reduction& r : chain) c = lift_bound(r, c, cap);
  return c;
}

inline ReductionArgs args_of(u64 n, u64 t = 0, unsigned d = 0, u64 q = 0) {
  ReductionArgs a;
  a.n = n;
  a.t = t;
  a.d = d;
  a.q = q;
  return a;
}

/// THR^1_m: rows in Subsets order, column i is the complement of row i.
inline Certificate thr1_bound(u64 m, const Modulus& mod) {
  const Predicate p = Predicate::thr(m, 1);
  const Domain sets = p.x_domain();
  TriangularWitness w = identity_witness(sets.size(), sets.size());
  for (u64 i = 0; i < sets.size(); ++i) w.col_order[i] = sets.index_of_subset(full_mask(m) & ~sets.subset_at(i));
  return relabel(triangular_bound(zero_pattern(p), mod, w), p);
}

}  // namespace detail

/// Strongest builtin argument for (P, m).
inline Certificate builtin_bound(const Predicate& p, const Modulus& m, u64 cap = kDefaultCellCap) {
  using detail::args_of;
  using detail::relabel;
  const u64 n = p.n();
  switch (p.id()) {
    case PredicateId::EQ: {
      if (m.is_prime()) {
        try {
          return exact_bound(p, m);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::CapExceeded && e.kind() != ErrorKind::TooLarge) throw;
        }
      }
      const ZeroPattern z = zero_pattern(p, cap);
      return relabel(triangular_bound(z, m, find_triangular_witness(z)), p);
    }
    case PredicateId::GT:
      return relabel(triangular_bound(zero_pattern(p, cap), m, identity_witness(n, n)), p);
    case PredicateId::NEQ: return relabel(diagonal_bound(zero_pattern(p, cap), m), p);
    case PredicateId::INDEX:
      return lift_bound(builtin_reduction("INDEX=>NEQ", args_of(n)), builtin_bound(Predicate::neq(n), m, cap), cap);
    case PredicateId::DISJ:
      return lift_bound(builtin_reduction("DISJ=>INDEX", args_of(n)), builtin_bound(Predicate::index(n), m, cap), cap);
    case PredicateId::OR_EQ: {
      const Reduction r = builtin_reduction("OR_EQ=>NEQ", args_of(n, 0, 0, p.q()));
      return lift_bound(r, builtin_bound(r.source, m, cap), cap);
    }
    case PredicateId::THR: {
      if (p.t() == 1) return detail::thr1_bound(n, m);
      const Reduction r = builtin_reduction("THR=>THR1", args_of(n, p.t()));
      return lift_bound(r, detail::thr1_bound(n - p.t() + 1, m), cap);
    }
    case PredicateId::ETHR: {
      const u64 t = p.t();
      const Reduction to_ethr1 = builtin_reduction("ETHR=>ETHR1", args_of(n, t));
      const Reduction to_gt = builtin_reduction("ETHR1=>GT", args_of(n - t + 1));
      Certificate best = detail::lift_chain(builtin_bound(to_gt.source, m, cap), {to_gt, to_ethr1}, cap);
      if (t + 2 <= n) {
        const Reduction to_neq = builtin_reduction("ETHR=>NEQ", args_of(t + 2));
        const Reduction embed = builtin_reduction("ETHR=>ETHR_T2", args_of(n, t));
        Certificate other = detail::lift_chain(builtin_bound(to_neq.source, m, cap), {to_neq, embed}, cap);
        if (other.bound > best.bound) best = std::move(other);
      }
      return best;
    }
    case PredicateId::MPOLY: {
      if (m.is_prime() && m.q() == p.q()) return mpoly_counting_bound(n, p.d(), p.q());
      const Reduction r = builtin_reduction("MPOLY=>NEQ", args_of(n, 0, p.d(), p.q()));
      return lift_bound(r, builtin_bound(r.source, m, cap), cap);
    }
    case PredicateId::TABLE:
      fail(ErrorKind::Unsupported, "no builtin bound for TABLE predicates; use the minimum rank oracle");
  }
  fail(ErrorKind::Unsupported, "unknown predicate");
}

// --- Re-checking --------------------------------------------------------

inline bool check(const Certificate& c, const ZeroPattern& z, const Modulus& m);

namespace detail {

inline bool check_lift(const Certificate& c, const LiftWitness& w, const Modulus& m) {
  if (!w.inner || w.inner->bound != c.bound || !(w.inner->modulus == m)) return false;
  try {
    const Reduction r = builtin_reduction(w.reduction, w.args);
    if (!(r.target == c.predicate) || !(r.source == w.inner->predicate)) return false;
    if (!verify_reduction(r)) return false;
    return check(*w.inner, zero_pattern(w.inner->predicate), m);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace detail

/// Replays the witness against the pattern z of c.predicate; true iff the
/// stated bound is re-derived.
inline bool check(const Certificate& c, const ZeroPattern& z, const Modulus& m) {
  if (!(c.modulus == m)) return false;
  return std::visit(
      [&](const auto& w) -> bool {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, MinRankWitness>) {
          if (c.method != BoundMethod::ExactMinRank || !m.is_prime() || w.prime != m.q()) return false;
          const ZqMatrix& f = w.matrix;
          if (f.rows() != z.rows || f.cols() != z.cols || f.modulus() != w.prime) return false;
          for (u64 r = 0; r < z.rows; ++r)
            for (u64 col = 0; col < z.cols; ++col)
              if ((f.at(r, col) == 0) != z.zero(r, col)) return false;
          if (rank_mod_p(f, w.prime) != c.bound) return false;
          try {
            return min_rank_oracle(z, w.prime) == c.bound;
          } catch (const Error&) {
            return false;
          }
        } else if constexpr (std::is_same_v<W, TriangularWitness>) {
          return c.method == BoundMethod::TriangularPigeonhole && pattern_is_triangular(z, w) &&
                 c.bound == pigeonhole_bound(w.diag_len, m);
        } else if constexpr (std::is_same_v<W, DiagonalWitness>) {
          if (c.method != BoundMethod::DiagonalNonzero || z.rows != z.cols || w.col_of_row.size() != z.rows ||
              !is_permutation_of(w.col_of_row, z.cols))
            return false;
          for (u64 r = 0; r < z.rows; ++r)
            for (u64 col = 0; col < z.cols; ++col)
              if (z.zero(r, col) != (col != w.col_of_row[r])) return false;
          return c.bound == pigeonhole_bound(z.rows, m);
        } else if constexpr (std::is_same_v<W, LiftWitness>) {
          return c.method == BoundMethod::ReductionLift && detail::check_lift(c, w, m);
        } else {
          return c.method == BoundMethod::CountingMPOLY && m.is_prime() && m.q() == w.q &&
                 c.predicate.id() == PredicateId::MPOLY && c.predicate.n() == w.n && c.predicate.d() == w.d &&
                 c.predicate.q() == w.q && c.bound == binomial_prefix(w.n, w.d);
        }
      },
      c.witness);
}

/// check against the pattern of the certified predicate; false when that
/// pattern is too large to enumerate.
inline bool check(const Certificate& c, const Modulus& m) {
  if (std::holds_alternative<CountingWitness>(c.witness) || std::holds_alternative<LiftWitness>(c.witness)) {
    const ZeroPattern unused{1, 1, {0}};
    return check(c, unused, m);
  }
  try {
    return check(c, zero_pattern(c.predicate), m);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace ipe
