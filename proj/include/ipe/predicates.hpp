#pragma once

// Predicate families over enumerable domains. Every domain element has a
// canonical index in [0, size); predicates are evaluated on indices and the
// codecs below translate between indices and concrete elements.
//
// Canonical orders:
//   Range(n)               1..n ascending (index = value - 1)
//   Subsets(n)             by size, then lexicographic on sorted elements
//   Bitstrings(n)          index = mask, bit i-1 holds x_i
//   VectorsModQ(n, q)      lexicographic, x_1 most significant
//   MultilinearPolys(n,d,q) coefficient vectors over the monomials X_S,
//                          |S| <= d, in Subsets order; lexicographic with the
//                          coefficient of X_{} most significant

#include <bit>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipe/error.hpp"
#include "ipe/modmath.hpp"

namespace ipe {

/// Default bound on |X| * |Y| for anything that enumerates a whole predicate.
inline constexpr u64 kDefaultCellCap = u64{1} << 20;

inline constexpr unsigned kMaxSetUniverse = 62;

/// Sparse multilinear polynomial; coefficients keyed by monomial mask
/// (bit i-1 set iff x_i occurs). Zero coefficients are never stored.
struct MultilinearPoly {
  unsigned n = 0;
  unsigned d = 0;
  u64 q = 2;
  std::map<u64, u64> coeffs;

  void add_term(u64 mask, u64 coefficient) {
    if (static_cast<unsigned>(std::popcount(mask)) > d)
      fail(ErrorKind::BadParams, "monomial degree exceeds " + std::to_string(d));
    u64& slot = coeffs[mask];
    slot = add_mod(slot, coefficient % q, q);
    if (slot == 0) coeffs.erase(mask);
  }

  u64 coefficient(u64 mask) const {
    auto it = coeffs.find(mask);
    return it == coeffs.end() ? 0 : it->second;
  }

  u64 eval(std::span<const u64> x) const {
    u64 acc = 0;
    for (const auto& [mask, a] : coeffs) {
      u64 term = a;
      for (u64 rest = mask; rest != 0 && term != 0; rest &= rest - 1)
        term = mul_mod(term, x[static_cast<std::size_t>(std::countr_zero(rest))] % q, q);
      acc = add_mod(acc, term, q);
    }
    return acc;
  }

  friend bool operator==(const MultilinearPoly&, const MultilinearPoly&) = default;
};

enum class DomainKind { Range, Subsets, Bitstrings, VectorsModQ, MultilinearPolys };

class Domain {
 public:
  static Domain range(u64 n) {
    if (n < 1) fail(ErrorKind::BadParams, "range domain needs n >= 1");
    return Domain(DomainKind::Range, n, 0, 0, n);
  }
  static Domain subsets(u64 n) { return Domain(DomainKind::Subsets, check_universe(n), 0, 0, u64{1} << n); }
  static Domain bitstrings(u64 n) { return Domain(DomainKind::Bitstrings, check_universe(n), 0, 0, u64{1} << n); }
  static Domain vectors(u64 n, u64 q) {
    check_modulus(q);
    if (n < 1) fail(ErrorKind::BadParams, "vector domain needs n >= 1");
    return Domain(DomainKind::VectorsModQ, n, q, 0, power_or_too_large(q, n));
  }
  static Domain polys(u64 n, unsigned d, u64 q) {
    check_modulus(q);
    check_universe(n);
    if (d > n) fail(ErrorKind::BadParams, "degree exceeds the number of variables");
    return Domain(DomainKind::MultilinearPolys, n, q, d, power_or_too_large(q, binomial_prefix(n, d)));
  }

  DomainKind kind() const noexcept { return kind_; }
  u64 n() const noexcept { return n_; }
  u64 q() const noexcept { return q_; }
  unsigned d() const noexcept { return d_; }
  u64 size() const noexcept { return size_; }

  friend bool operator==(const Domain&, const Domain&) = default;

  // --- Subsets -----------------------------------------------------------

  /// Mask of the subset with the given canonical index.
  u64 subset_at(u64 index) const {
    check_index(index);
    if (kind_ == DomainKind::Bitstrings) return index;
    return subset_by_rank(n_, index);
  }

  u64 index_of_subset(u64 mask) const {
    if (n_ < 64 && (mask >> n_) != 0) fail(ErrorKind::DomainMismatch, "set element outside [n]");
    if (kind_ == DomainKind::Bitstrings) return mask;
    return rank_of_subset(n_, mask);
  }

  /// Parses "x_1 x_2 ... x_n" written as a 0/1 string, e.g. "10".
  u64 index_of_bitstring(std::string_view bits) const {
    if (bits.size() != n_) fail(ErrorKind::DomainMismatch, "bitstring length differs from n");
    u64 mask = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1') fail(ErrorKind::Parse, "bitstring must contain only 0 and 1");
      if (bits[i] == '1') mask |= u64{1} << i;
    }
    return index_of_subset(mask);
  }

  // --- Vectors -----------------------------------------------------------

  std::vector<u64> vector_at(u64 index) const {
    check_index(index);
    std::vector<u64> x(n_);
    for (u64 i = n_; i-- > 0;) {
      x[i] = index % q_;
      index /= q_;
    }
    return x;
  }

  u64 index_of_vector(std::span<const u64> x) const {
    if (x.size() != n_) fail(ErrorKind::DomainMismatch, "vector length differs from n");
    u64 index = 0;
    for (u64 v : x) {
      if (v >= q_) fail(ErrorKind::DomainMismatch, "vector entry not reduced");
      index = index * q_ + v;
    }
    return index;
  }

  // --- Polynomials -------------------------------------------------------

  MultilinearPoly poly_at(u64 index) const {
    check_index(index);
    const u64 monomials = binomial_prefix(n_, d_);
    MultilinearPoly p{static_cast<unsigned>(n_), d_, q_, {}};
    for (u64 j = monomials; j-- > 0;) {
      const u64 a = index % q_;
      index /= q_;
      if (a != 0) p.coeffs[subset_by_rank(n_, j)] = a;
    }
    return p;
  }

  u64 index_of_poly(const MultilinearPoly& p) const {
    if (p.n != n_ || p.q != q_) fail(ErrorKind::DomainMismatch, "polynomial ring differs from the domain");
    const u64 monomials = binomial_prefix(n_, d_);
    u64 index = 0;
    for (u64 j = 0; j < monomials; ++j) index = index * q_ + p.coefficient(subset_by_rank(n_, j));
    for (const auto& [mask, a] : p.coeffs)
      if (static_cast<unsigned>(std::popcount(mask)) > d_) fail(ErrorKind::DomainMismatch, "polynomial degree too high");
    return index;
  }

  // --- Combinatorial ranking of subsets in (size, lex) order ------------

  static u64 rank_of_subset(u64 n, u64 mask) {
    const auto size = static_cast<u64>(std::popcount(mask));
    u64 rank = 0;
    for (u64 s = 0; s < size; ++s) rank += binomial(n, s);
    u64 remaining = size;
    u64 prev = 0;  // previous element, 1-based
    for (u64 e = 1; e <= n && remaining > 0; ++e) {
      if ((mask >> (e - 1)) & 1) {
        for (u64 v = prev + 1; v < e; ++v) rank += binomial(n - v, remaining - 1);
        prev = e;
        --remaining;
      }
    }
    return rank;
  }

  static u64 subset_by_rank(u64 n, u64 rank) {
    u64 size = 0;
    while (true) {
      const u64 block = binomial(n, size);
      if (rank < block) break;
      rank -= block;
      ++size;
    }
    u64 mask = 0;
    u64 e = 1;
    for (u64 remaining = size; remaining > 0; --remaining) {
      while (true) {
        const u64 with_e = binomial(n - e, remaining - 1);
        if (rank < with_e) break;
        rank -= with_e;
        ++e;
      }
      mask |= u64{1} << (e - 1);
      ++e;
    }
    return mask;
  }

 private:
  Domain(DomainKind kind, u64 n, u64 q, unsigned d, u64 size) : kind_(kind), n_(n), q_(q), d_(d), size_(size) {}

  static u64 check_universe(u64 n) {
    if (n < 1 || n > kMaxSetUniverse)
      fail(ErrorKind::BadParams, "set universe size must be in [1, " + std::to_string(kMaxSetUniverse) + "]");
    return n;
  }
  static void check_modulus(u64 q) {
    if (q < 2) fail(ErrorKind::BadParams, "modulus must be at least 2");
  }
  static u64 power_or_too_large(u64 base, u64 exp) {
    try {
      return checked_pow(base, exp);
    } catch (const Error&) {
      fail(ErrorKind::TooLarge, std::to_string(base) + "^" + std::to_string(exp) + " elements exceed 64-bit indexing");
    }
  }
  void check_index(u64 index) const {
    if (index >= size_) fail(ErrorKind::DomainMismatch, "index " + std::to_string(index) + " outside the domain");
  }

  DomainKind kind_;
  u64 n_;
  u64 q_;
  unsigned d_;
  u64 size_;
};

enum class PredicateId { EQ, GT, NEQ, INDEX, DISJ, ETHR, THR, MPOLY, OR_EQ, TABLE };

inline constexpr std::string_view to_string(PredicateId id) {
  switch (id) {
    case PredicateId::EQ: return "EQ";
    case PredicateId::GT: return "GT";
    case PredicateId::NEQ: return "NEQ";
    case PredicateId::INDEX: return "INDEX";
    case PredicateId::DISJ: return "DISJ";
    case PredicateId::ETHR: return "ETHR";
    case PredicateId::THR: return "THR";
    case PredicateId::MPOLY: return "MPOLY";
    case PredicateId::OR_EQ: return "OR_EQ";
    case PredicateId::TABLE: return "TABLE";
  }
  return "?";
}

inline PredicateId predicate_id_from_string(std::string_view name) {
  std::string upper;
  for (char c : name) upper.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (auto id : {PredicateId::EQ, PredicateId::GT, PredicateId::NEQ, PredicateId::INDEX, PredicateId::DISJ,
                  PredicateId::ETHR, PredicateId::THR, PredicateId::MPOLY, PredicateId::OR_EQ, PredicateId::TABLE})
    if (upper == to_string(id)) return id;
  if (upper == "OREQ") return PredicateId::OR_EQ;
  fail(ErrorKind::Parse, "unknown predicate '" + std::string(name) + "'");
}

/// A two-argument Boolean function on canonical domain indices.
class Predicate {
 public:
  static Predicate eq(u64 n) { return ranged(PredicateId::EQ, n); }
  static Predicate gt(u64 n) { return ranged(PredicateId::GT, n); }
  static Predicate neq(u64 n) { return ranged(PredicateId::NEQ, n); }

  static Predicate index(u64 n) { return over_sets(PredicateId::INDEX, n, 0); }
  static Predicate disj(u64 n) { return over_sets(PredicateId::DISJ, n, 0); }
  static Predicate ethr(u64 n, u64 t) { return over_sets(PredicateId::ETHR, n, t); }
  static Predicate thr(u64 n, u64 t) { return over_sets(PredicateId::THR, n, t); }

  static Predicate mpoly(u64 n, unsigned d, u64 q) {
    if (n < 1 || n > kMaxSetUniverse || d > n || q < 2)
      fail(ErrorKind::BadParams, "MPOLY needs 1 <= n <= 62, d <= n and q >= 2");
    Predicate p(PredicateId::MPOLY);
    p.n_ = n;
    p.d_ = d;
    p.q_ = q;
    return p;
  }

  static Predicate oreq(u64 n, u64 q) {
    if (n < 1 || q < 2) fail(ErrorKind::BadParams, "OR_EQ needs n >= 1 and q >= 2");
    Predicate p(PredicateId::OR_EQ);
    p.n_ = n;
    p.q_ = q;
    return p;
  }

  /// bits is row-major |X| x |Y|; nonzero means the predicate is true.
  static Predicate table(u64 rows, u64 cols, std::vector<std::uint8_t> bits) {
    if (rows < 1 || cols < 1) fail(ErrorKind::BadParams, "TABLE needs positive dimensions");
    if (bits.size() != rows * cols) fail(ErrorKind::BadParams, "TABLE bit count does not match rows * cols");
    for (auto& b : bits) b = b != 0;
    Predicate p(PredicateId::TABLE);
    p.n_ = rows;
    p.cols_ = cols;
    p.bits_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(bits));
    return p;
  }

  PredicateId id() const noexcept { return id_; }
  u64 n() const noexcept { return n_; }
  u64 t() const noexcept { return t_; }
  unsigned d() const noexcept { return d_; }
  u64 q() const noexcept { return q_; }
  u64 table_rows() const noexcept { return n_; }
  u64 table_cols() const noexcept { return cols_; }
  std::span<const std::uint8_t> table_bits() const {
    return bits_ ? std::span<const std::uint8_t>(*bits_) : std::span<const std::uint8_t>();
  }

  Domain x_domain() const {
    switch (id_) {
      case PredicateId::EQ:
      case PredicateId::GT:
      case PredicateId::NEQ:
      case PredicateId::TABLE: return Domain::range(n_);
      case PredicateId::INDEX: return Domain::bitstrings(n_);
      case PredicateId::DISJ:
      case PredicateId::ETHR:
      case PredicateId::THR: return Domain::subsets(n_);
      case PredicateId::MPOLY:
      case PredicateId::OR_EQ: return Domain::vectors(n_, q_);
    }
    fail(ErrorKind::BadParams, "unknown predicate");
  }

  Domain y_domain() const {
    switch (id_) {
      case PredicateId::EQ:
      case PredicateId::GT:
      case PredicateId::NEQ:
      case PredicateId::INDEX: return Domain::range(n_);
      case PredicateId::TABLE: return Domain::range(cols_);
      case PredicateId::DISJ:
      case PredicateId::ETHR:
      case PredicateId::THR: return Domain::subsets(n_);
      case PredicateId::MPOLY: return Domain::polys(n_, d_, q_);
      case PredicateId::OR_EQ: return Domain::vectors(n_, q_);
    }
    fail(ErrorKind::BadParams, "unknown predicate");
  }

  /// Truth value on canonical indices.
  bool eval(u64 x, u64 y) const {
    switch (id_) {
      case PredicateId::EQ: check_range(x, y, n_, n_); return x == y;
      case PredicateId::GT: check_range(x, y, n_, n_); return x > y;
      case PredicateId::NEQ: check_range(x, y, n_, n_); return x != y;
      case PredicateId::TABLE: check_range(x, y, n_, cols_); return (*bits_)[x * cols_ + y] != 0;
      case PredicateId::INDEX:
        check_range(x, y, u64{1} << n_, n_);
        return ((x >> y) & 1) == 0;  // true iff the selected bit is 0
      case PredicateId::DISJ:
      case PredicateId::ETHR:
      case PredicateId::THR: {
        const Domain dom = Domain::subsets(n_);
        const auto common = static_cast<u64>(std::popcount(dom.subset_at(x) & dom.subset_at(y)));
        if (id_ == PredicateId::DISJ) return common == 0;
        if (id_ == PredicateId::ETHR) return common == t_;
        return common >= t_;
      }
      case PredicateId::MPOLY: {
        const auto xs = x_domain().vector_at(x);
        return y_domain().poly_at(y).eval(xs) == 0;
      }
      case PredicateId::OR_EQ: {
        const Domain dom = x_domain();
        const auto xs = dom.vector_at(x);
        const auto ys = dom.vector_at(y);
        for (u64 i = 0; i < n_; ++i)
          if (xs[i] == ys[i]) return true;
        return false;
      }
    }
    return false;
  }

  std::string name() const {
    std::string s(to_string(id_));
    switch (id_) {
      case PredicateId::ETHR:
      case PredicateId::THR: return s + "_" + std::to_string(n_) + "^" + std::to_string(t_);
      case PredicateId::MPOLY:
        return s + "_" + std::to_string(n_) + "^{" + std::to_string(d_) + "," + std::to_string(q_) + "}";
      case PredicateId::OR_EQ: return s + "_" + std::to_string(n_) + "^" + std::to_string(q_);
      case PredicateId::TABLE: return s + "_" + std::to_string(n_) + "x" + std::to_string(cols_);
      default: return s + "_" + std::to_string(n_);
    }
  }

  friend bool operator==(const Predicate& a, const Predicate& b) {
    if (a.id_ != b.id_ || a.n_ != b.n_ || a.t_ != b.t_ || a.d_ != b.d_ || a.q_ != b.q_ || a.cols_ != b.cols_)
      return false;
    if (a.id_ != PredicateId::TABLE) return true;
    return *a.bits_ == *b.bits_;
  }

 private:
  explicit Predicate(PredicateId id) : id_(id) {}

  static Predicate ranged(PredicateId id, u64 n) {
    if (n < 1) fail(ErrorKind::BadParams, std::string(to_string(id)) + " needs n >= 1");
    Predicate p(id);
    p.n_ = n;
    return p;
  }

  static Predicate over_sets(PredicateId id, u64 n, u64 t) {
    if (n < 1 || n > kMaxSetUniverse)
      fail(ErrorKind::BadParams, std::string(to_string(id)) + " needs 1 <= n <= " + std::to_string(kMaxSetUniverse));
    if ((id == PredicateId::ETHR || id == PredicateId::THR) && (t < 1 || t > n))
      fail(ErrorKind::BadParams, std::string(to_string(id)) + " needs 1 <= t <= n");
    Predicate p(id);
    p.n_ = n;
    p.t_ = t;
    return p;
  }

  static void check_range(u64 x, u64 y, u64 xs, u64 ys) {
    if (x >= xs || y >= ys) fail(ErrorKind::DomainMismatch, "argument outside the predicate domain");
  }

  PredicateId id_;
  u64 n_ = 0;
  u64 t_ = 0;
  unsigned d_ = 0;
  u64 q_ = 0;
  u64 cols_ = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> bits_;
};

/// |X| x |Y| layout every representing matrix must follow: forced zero
/// where the predicate holds, forced nonzero elsewhere.
struct ZeroPattern {
  u64 rows = 0;
  u64 cols = 0;
  std::vector<std::uint8_t> forced_zero;

  bool zero(u64 r, u64 c) const { return forced_zero[r * cols + c] != 0; }

  friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;
};

inline u64 cell_count(const Predicate& p) {
  const u64 xs = p.x_domain().size();
  const u64 ys = p.y_domain().size();
  u64 cells = 0;
  if (__builtin_mul_overflow(xs, ys, &cells)) fail(ErrorKind::TooLarge, p.name() + " has more than 2^64 cells");
  return cells;
}

inline ZeroPattern zero_pattern(const Predicate& p, u64 cap = kDefaultCellCap) {
  const u64 cells = cell_count(p);
  if (cells > cap)
    fail(ErrorKind::TooLarge, p.name() + " has " + std::to_string(cells) + " cells, cap is " + std::to_string(cap));
  ZeroPattern z{p.x_domain().size(), p.y_domain().size(), std::vector<std::uint8_t>(cells)};
  for (u64 x = 0; x < z.rows; ++x)
    for (u64 y = 0; y < z.cols; ++y) z.forced_zero[x * z.cols + y] = p.eval(x, y) ? 1 : 0;
  return z;
}

/// The TABLE predicate with the same truth table as p.
inline Predicate tabulate(const Predicate& p, u64 cap = kDefaultCellCap) {
  const ZeroPattern z = zero_pattern(p, cap);
  return Predicate::table(z.rows, z.cols, z.forced_zero);
}

}  // namespace ipe
