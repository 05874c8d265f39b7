#pragma once

// Dense matrices over Z_q, exact rank and rank factorization over prime
// fields, residue projection, and the triangular / pigeonhole machinery
// used to carry rank lower bounds from prime to square-free moduli.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "ipe/error.hpp"
#include "ipe/modmath.hpp"

namespace ipe {

/// Row-major matrix with entries in [0, q). Zero-sized dimensions are
/// permitted so that rank-0 factorizations have a representation.
class ZqMatrix {
 public:
  ZqMatrix(std::size_t rows, std::size_t cols, u64 q) : rows_(rows), cols_(cols), q_(q), entries_(rows * cols, 0) {
    if (q < 2) fail(ErrorKind::BadParams, "matrix modulus must be at least 2");
  }

  ZqMatrix(std::size_t rows, std::size_t cols, u64 q, std::vector<u64> entries)
      : rows_(rows), cols_(cols), q_(q), entries_(std::move(entries)) {
    if (q < 2) fail(ErrorKind::BadParams, "matrix modulus must be at least 2");
    if (entries_.size() != rows * cols)
      fail(ErrorKind::BadParams, "expected " + std::to_string(rows * cols) + " entries, got " +
                                     std::to_string(entries_.size()));
    for (u64 v : entries_)
      if (v >= q) fail(ErrorKind::BadParams, "entry " + std::to_string(v) + " not reduced modulo " + std::to_string(q));
  }

  static ZqMatrix from_rows(u64 q, std::initializer_list<std::initializer_list<u64>> rows) {
    std::vector<u64> entries;
    std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
    for (const auto& r : rows) {
      if (r.size() != cols) fail(ErrorKind::BadParams, "ragged row list");
      entries.insert(entries.end(), r.begin(), r.end());
    }
    return ZqMatrix(rows.size(), cols, q, std::move(entries));
  }

  static ZqMatrix identity(std::size_t n, u64 q) {
    ZqMatrix m(n, n, q);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  static ZqMatrix ones(std::size_t rows, std::size_t cols, u64 q) {
    return ZqMatrix(rows, cols, q, std::vector<u64>(rows * cols, 1));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  u64 modulus() const noexcept { return q_; }
  std::span<const u64> entries() const noexcept { return entries_; }

  u64 at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  void set(std::size_t r, std::size_t c, u64 v) {
    if (v >= q_) fail(ErrorKind::BadParams, "entry " + std::to_string(v) + " not reduced modulo " + std::to_string(q_));
    entries_[r * cols_ + c] = v;
  }

  std::span<const u64> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  friend bool operator==(const ZqMatrix&, const ZqMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  u64 q_;
  std::vector<u64> entries_;
};

inline ZqMatrix multiply(const ZqMatrix& a, const ZqMatrix& b) {
  if (a.modulus() != b.modulus()) fail(ErrorKind::ModulusMismatch, "operands use different moduli");
  if (a.cols() != b.rows()) fail(ErrorKind::BadParams, "inner dimensions differ");
  const u64 q = a.modulus();
  ZqMatrix out(a.rows(), b.cols(), q);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      u64 acc = 0;
      for (std::size_t l = 0; l < a.cols(); ++l) acc = add_mod(acc, mul_mod(a.at(i, l), b.at(l, j), q), q);
      out.set(i, j, acc);
    }
  return out;
}

inline ZqMatrix transpose(const ZqMatrix& a) {
  ZqMatrix out(a.cols(), a.rows(), a.modulus());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(j, i, a.at(i, j));
  return out;
}

inline ZqMatrix submatrix(const ZqMatrix& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  ZqMatrix out(rows.size(), cols.size(), a.modulus());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out.set(i, j, a.at(rows[i], cols[j]));
  return out;
}

/// Entrywise reduction into Z_m (no relationship between m and the
/// matrix modulus is required).
inline ZqMatrix reduce_mod(const ZqMatrix& a, u64 m) {
  std::vector<u64> entries(a.entries().begin(), a.entries().end());
  for (u64& v : entries) v %= m;
  return ZqMatrix(a.rows(), a.cols(), m, std::move(entries));
}

/// F mod p for a prime factor p of F's modulus.
inline ZqMatrix residue_matrix(const ZqMatrix& f, u64 p) {
  if (!is_prime(p) || f.modulus() % p != 0)
    fail(ErrorKind::NotAFactor, std::to_string(p) + " is not a prime factor of " + std::to_string(f.modulus()));
  return reduce_mod(f, p);
}

namespace detail {

inline void require_prime(u64 p) {
  if (!is_prime(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
}

/// In-place reduced row echelon form over Z_p. Columns are scanned left to
/// right; the pivot is the lowest-index remaining row with a nonzero entry.
inline std::vector<std::size_t> rref(std::vector<u64>& a, std::size_t rows, std::size_t cols, u64 p) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && a[pivot * cols + c] == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a[pivot * cols + j], a[r * cols + j]);
    const u64 inv = pow_mod(a[r * cols + c], p - 2, p);
    for (std::size_t j = c; j < cols; ++j) a[r * cols + j] = mul_mod(a[r * cols + j], inv, p);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const u64 factor = a[i * cols + c];
      if (factor == 0) continue;
      for (std::size_t j = c; j < cols; ++j)
        a[i * cols + j] = sub_mod(a[i * cols + j], mul_mod(factor, a[r * cols + j], p), p);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::vector<u64> reduced_entries(const ZqMatrix& f, u64 p) {
  std::vector<u64> work(f.entries().begin(), f.entries().end());
  for (u64& v : work) v %= p;
  return work;
}

}  // namespace detail

/// Rank of F over the field Z_p; entries are reduced mod p first.
inline std::size_t rank_mod_p(const ZqMatrix& f, u64 p) {
  detail::require_prime(p);
  auto work = detail::reduced_entries(f, p);
  return detail::rref(work, f.rows(), f.cols(), p).size();
}

/// F = U * V over Z_p with inner dimension rank(F).
struct RankFactorization {
  ZqMatrix u;  // rows x rank: the pivot columns of F mod p
  ZqMatrix v;  // rank x cols: nonzero rows of the reduced row echelon form
  std::size_t rank;
  u64 p;
  std::vector<std::size_t> pivot_columns;
};

inline RankFactorization factor_rank(const ZqMatrix& f, u64 p) {
  detail::require_prime(p);
  const auto reduced = detail::reduced_entries(f, p);
  auto work = reduced;
  const auto pivots = detail::rref(work, f.rows(), f.cols(), p);
  const std::size_t r = pivots.size();
  ZqMatrix u(f.rows(), r, p);
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < r; ++j) u.set(i, j, reduced[i * f.cols() + pivots[j]]);
  ZqMatrix v(r, f.cols(), p, std::vector<u64>(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(r * f.cols())));
  return {std::move(u), std::move(v), r, p, pivots};
}

/// Row/column orderings under which the leading diag_len x diag_len block
/// is zero strictly below the diagonal and nonzero on it.
struct TriangularWitness {
  std::vector<std::size_t> row_order;
  std::vector<std::size_t> col_order;
  std::size_t diag_len = 0;

  friend bool operator==(const TriangularWitness&, const TriangularWitness&) = default;
};

inline TriangularWitness identity_witness(std::size_t rows, std::size_t cols) {
  TriangularWitness w;
  for (std::size_t i = 0; i < rows; ++i) w.row_order.push_back(i);
  for (std::size_t j = 0; j < cols; ++j) w.col_order.push_back(j);
  w.diag_len = std::min(rows, cols);
  return w;
}

inline bool is_permutation_of(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (std::size_t v : order) {
    if (v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline void validate_witness(const TriangularWitness& w, std::size_t rows, std::size_t cols) {
  if (!is_permutation_of(w.row_order, rows) || !is_permutation_of(w.col_order, cols))
    fail(ErrorKind::BadPermutation, "orders must be permutations of the row and column indices");
  if (w.diag_len > rows || w.diag_len > cols)
    fail(ErrorKind::BadPermutation, "diagonal length exceeds the matrix dimensions");
}

/// True iff the ordered leading block is upper triangular with a diagonal
/// that is nonzero modulo the matrix modulus.
inline bool check_triangular(const ZqMatrix& f, const TriangularWitness& w) {
  validate_witness(w, f.rows(), f.cols());
  for (std::size_t i = 0; i < w.diag_len; ++i) {
    if (f.at(w.row_order[i], w.col_order[i]) == 0) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (f.at(w.row_order[i], w.col_order[j]) != 0) return false;
  }
  return true;
}

struct PigeonholeResult {
  u64 prime;
  std::vector<std::size_t> diagonal_indices;  // positions along the witness diagonal
};

/// Picks the prime factor of q keeping the most diagonal entries nonzero
/// (smallest prime on ties). At least ceil(n/k) entries survive.
inline PigeonholeResult pigeonhole_factor(const ZqMatrix& f, const TriangularWitness& w, const Modulus& m) {
  if (m.q() != f.modulus()) fail(ErrorKind::ModulusMismatch, "modulus does not match the matrix");
  if (!check_triangular(f, w)) fail(ErrorKind::NotTriangular, "matrix is not triangular under the witness");
  PigeonholeResult best{0, {}};
  for (u64 p : m.factors()) {
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < w.diag_len; ++i)
      if (f.at(w.row_order[i], w.col_order[i]) % p != 0) survivors.push_back(i);
    if (best.prime == 0 || survivors.size() > best.diagonal_indices.size()) best = {p, std::move(survivors)};
  }
  return best;
}

}  // namespace ipe
