#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ipe/error.hpp"
#include "ipe/modmath.hpp"
#include "ipe/predicates.hpp"
#include "ipe/zqlinalg.hpp"

namespace ipe {

using Vec = std::vector<u64>;

/// x -> vx, y -> vy into Z_q^length, indexed by canonical domain indices.
/// The maps are evaluated lazily so encodings of large domains stay cheap.
struct Encoding {
  u64 q = 2;
  std::vector<u64> factors;  // distinct prime factors of q
  std::size_t length = 0;
  u64 x_count = 0;
  u64 y_count = 0;
  std::function<Vec(u64)> x;
  std::function<Vec(u64)> y;
  std::string provenance;
};

inline u64 inner_product(std::span<const u64> a, std::span<const u64> b, u64 q) {
  if (a.size() != b.size()) fail(ErrorKind::BadParams, "vector lengths differ");
  // Accumulate without reduction when length * (q-1)^2 cannot overflow.
  if (q <= (u64{1} << 31) && a.size() <= (u64{1} << 2)) {
    u64 acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc % q;
  }
  if (q <= (u64{1} << 20)) {
    u64 acc = 0;
    std::size_t pending = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      acc += a[i] * b[i];
      if (++pending == (std::size_t{1} << 23)) {
        acc %= q;
        pending = 0;
      }
    }
    return acc % q;
  }
  u64 acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc = add_mod(acc, mul_mod(a[i], b[i], q), q);
  return acc;
}

/// Table-backed encoding; the tables are shared, not copied, by the maps.
inline Encoding from_tables(u64 q, std::size_t length, std::vector<Vec> xs, std::vector<Vec> ys, std::string provenance) {
  if (q < 2) fail(ErrorKind::BadParams, "encoding modulus must be at least 2");
  for (const auto* table : {&xs, &ys})
    for (const Vec& v : *table) {
      if (v.size() != length) fail(ErrorKind::BadParams, "encoding vector has the wrong length");
      for (u64 e : v)
        if (e >= q) fail(ErrorKind::BadParams, "encoding entry not reduced modulo q");
    }
  auto x_table = std::make_shared<const std::vector<Vec>>(std::move(xs));
  auto y_table = std::make_shared<const std::vector<Vec>>(std::move(ys));
  Encoding e;
  e.q = q;
  e.factors = distinct_prime_factors(q);
  e.length = length;
  e.x_count = x_table->size();
  e.y_count = y_table->size();
  e.x = [x_table](u64 i) { return x_table->at(i); };
  e.y = [y_table](u64 i) { return y_table->at(i); };
  e.provenance = std::move(provenance);
  return e;
}

/// Materializes every vector of both maps.
inline Encoding tabulate(const Encoding& e, u64 cap = kDefaultCellCap) {
  if (e.x_count > cap || e.y_count > cap)
    fail(ErrorKind::TooLarge, "encoding domain exceeds the tabulation cap " + std::to_string(cap));
  std::vector<Vec> xs, ys;
  xs.reserve(e.x_count);
  ys.reserve(e.y_count);
  for (u64 i = 0; i < e.x_count; ++i) xs.push_back(e.x(i));
  for (u64 i = 0; i < e.y_count; ++i) ys.push_back(e.y(i));
  return from_tables(e.q, e.length, std::move(xs), std::move(ys), e.provenance);
}

/// F_{x,y} = <vx, vy> mod q.
inline ZqMatrix gram_matrix(const Encoding& e, u64 cap = kDefaultCellCap) {
  if (e.x_count == 0 || e.y_count == 0 || e.x_count > cap / e.y_count)
    fail(ErrorKind::TooLarge, "Gram matrix exceeds the cell cap");
  std::vector<Vec> ys;
  for (u64 j = 0; j < e.y_count; ++j) ys.push_back(e.y(j));
  ZqMatrix f(e.x_count, e.y_count, e.q);
  for (u64 i = 0; i < e.x_count; ++i) {
    const Vec vx = e.x(i);
    for (u64 j = 0; j < e.y_count; ++j) f.set(i, j, inner_product(vx, ys[j], e.q));
  }
  return f;
}

struct Mismatch {
  u64 x;
  u64 y;
  u64 inner_product;
  bool expected;  // predicate value at (x, y)

  friend bool operator==(const Mismatch&, const Mismatch&) = default;
};

struct VerificationReport {
  u64 checked_pairs = 0;
  std::vector<Mismatch> mismatches;  // sorted by (x, y)

  bool ok() const noexcept { return mismatches.empty(); }
};

/// Checks P(x,y) = 1 <=> <vx,vy> = 0 (mod q) on every pair.
inline VerificationReport verify(const Predicate& p, const Encoding& e, u64 cap = kDefaultCellCap) {
  const u64 cells = cell_count(p);
  if (cells > cap)
    fail(ErrorKind::TooLarge, p.name() + " has " + std::to_string(cells) + " pairs, cap is " + std::to_string(cap));
  const u64 xs = p.x_domain().size();
  const u64 ys = p.y_domain().size();
  if (e.x_count != xs || e.y_count != ys)
    fail(ErrorKind::DomainMismatch, "encoding covers " + std::to_string(e.x_count) + "x" + std::to_string(e.y_count) +
                                        " elements, " + p.name() + " needs " + std::to_string(xs) + "x" +
                                        std::to_string(ys));
  auto checked_vec = [&](Vec v) {
    if (v.size() != e.length) fail(ErrorKind::BadParams, "encoding produced a vector of the wrong length");
    return v;
  };
  std::vector<Vec> y_vecs;
  y_vecs.reserve(ys);
  for (u64 j = 0; j < ys; ++j) y_vecs.push_back(checked_vec(e.y(j)));
  VerificationReport report;
  for (u64 i = 0; i < xs; ++i) {
    const Vec vx = checked_vec(e.x(i));
    for (u64 j = 0; j < ys; ++j) {
      const u64 ip = inner_product(vx, y_vecs[j], e.q);
      const bool expected = p.eval(i, j);
      if ((ip == 0) != expected) report.mismatches.push_back({i, j, ip, expected});
    }
  }
  report.checked_pairs = cells;
  return report;
}

}  // namespace ipe
