#pragma once

// Predicate reductions. A reduction "target => source" consists of maps
// f : X_source -> X_target and g : Y_source -> Y_target with
// target(f(x), g(y)) = source(x, y); when `swapped` is set the maps land on
// the opposite sides, f : X_source -> Y_target and g : Y_source -> X_target.
// An encoding of the target therefore yields one of the source, and a lower
// bound for the source yields one for the target.

#include <bit>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipe/encoding.hpp"
#include "ipe/error.hpp"
#include "ipe/predicates.hpp"

namespace ipe {

/// Parameters naming a builtin reduction instance. Which fields are read
/// depends on the reduction; see builtin_reduction.
struct ReductionArgs {
  u64 n = 0;
  u64 t = 0;
  unsigned d = 0;
  u64 q = 0;
  std::optional<Predicate> predicate;  // for the truth-table reductions
};

struct Reduction {
  std::string name;
  ReductionArgs args;
  Predicate source;  // P1: the predicate being solved
  Predicate target;  // P2: the predicate whose encodings are reused
  std::function<u64(u64)> f;
  std::function<u64(u64)> g;
  bool swapped = false;
};

// --- polynomial builders shared with the encoders ---------------------

/// p_T(x) = prod_{j=t..n} (sum_{i in T} x_i - j), multilinearized with
/// x_i^2 = x_i; vanishes on 0/1 inputs iff |S cap T| >= t.
inline MultilinearPoly threshold_poly(u64 n, u64 t, u64 set_mask, u64 q) {
  const auto degree = static_cast<unsigned>(n - t + 1);
  MultilinearPoly p{static_cast<unsigned>(n), degree, q, {}};
  p.add_term(0, 1);
  for (u64 j = t; j <= n; ++j) {
    MultilinearPoly next{p.n, p.d, q, {}};
    const u64 minus_j = neg_mod(j % q, q);
    for (const auto& [mask, a] : p.coeffs) {
      next.add_term(mask, mul_mod(a, minus_j, q));
      for (u64 rest = set_mask; rest != 0; rest &= rest - 1) next.add_term(mask | (rest & -rest), a);
    }
    p = std::move(next);
  }
  return p;
}

/// prod_i (x_i - y_i): coefficient of X_S is prod_{i not in S} (-y_i).
inline MultilinearPoly disagreement_poly(std::span<const u64> y, u64 q) {
  const auto n = static_cast<unsigned>(y.size());
  MultilinearPoly p{n, n, q, {}};
  for (u64 mask = 0; mask < (u64{1} << n); ++mask) {
    u64 c = 1;
    for (unsigned i = 0; i < n; ++i)
      if (!((mask >> i) & 1)) c = mul_mod(c, neg_mod(y[i] % q, q), q);
    p.add_term(mask, c);
  }
  return p;
}

namespace detail {

inline Reduction make_reduction(std::string name, ReductionArgs args, Predicate source, Predicate target,
                                std::function<u64(u64)> f, std::function<u64(u64)> g, bool swapped = false) {
  return {std::move(name), std::move(args), std::move(source), std::move(target), std::move(f), std::move(g), swapped};
}

inline u64 full_mask(u64 n) { return n >= 64 ? ~u64{0} : (u64{1} << n) - 1; }

/// Maps subsets of [m] into subsets of [n] by adding the elements m+1..n.
inline std::function<u64(u64)> pad_with_top(u64 m, u64 n) {
  const Domain from = Domain::subsets(m);
  const Domain to = Domain::subsets(n);
  const u64 top = full_mask(n) & ~full_mask(m);
  return [from, to, top](u64 i) { return to.index_of_subset(from.subset_at(i) | top); };
}

inline Reduction truth_table_reduction(const Predicate& p) {
  const u64 xs = p.x_domain().size();
  const u64 ys = p.y_domain().size();
  const u64 side = std::min(xs, ys);
  if (side > kMaxSetUniverse)
    fail(ErrorKind::TooLarge, "truth-table reduction needs min(|X|,|Y|) <= " + std::to_string(kMaxSetUniverse));
  ReductionArgs args;
  args.predicate = p;
  // INDEX is true on a 0 bit, so each data string stores the complement of
  // the truth-table row (or column).
  if (ys <= xs) {
    auto row = [p, ys](u64 x) {
      u64 mask = 0;
      for (u64 y = 0; y < ys; ++y)
        if (!p.eval(x, y)) mask |= u64{1} << y;
      return mask;
    };
    return make_reduction("INDEX=>ANY", args, p, Predicate::index(ys), row, [](u64 y) { return y; });
  }
  auto column = [p, xs](u64 y) {
    u64 mask = 0;
    for (u64 x = 0; x < xs; ++x)
      if (!p.eval(x, y)) mask |= u64{1} << x;
    return mask;
  };
  return make_reduction("INDEX=>ANY", args, p, Predicate::index(xs), [](u64 x) { return x; }, column, true);
}

}  // namespace detail

inline const std::vector<std::string_view>& builtin_reduction_names() {
  static const std::vector<std::string_view> names = {
      "DISJ=>INDEX", "INDEX=>NEQ", "INDEX=>GT",   "INDEX=>ANY",   "TABLE=>ANY", "ETHR=>ETHR1", "ETHR1=>GT",
      "ETHR=>ETHR_T2", "ETHR=>NEQ", "MPOLY=>THR", "MPOLY=>OR_EQ", "MPOLY=>NEQ", "OR_EQ=>NEQ", "THR=>THR1"};
  return names;
}

/// Builtin reductions, named "target=>source":
///   DISJ=>INDEX   (n)      INDEX_n(x, i) = DISJ_n(chi^-1(x), {i})
///   INDEX=>NEQ    (n)      NEQ_n(i, j) = INDEX_n(e_i, j)
///   INDEX=>GT     (n)      GT_n(x, y) = INDEX_n(chi([y]), x)   [swapped]
///   INDEX=>ANY    (predicate) truth table of P through INDEX_min(|X|,|Y|)
///   TABLE=>ANY    (predicate) P through its TABLE form (identity maps)
///   ETHR=>ETHR1   (n, t)   ETHR^1_{n-t+1} inside ETHR^t_n, S -> S u {n-t+2..n}
///   ETHR1=>GT     (n = m)  GT_{m+1} inside ETHR^1_m
///   ETHR=>ETHR_T2 (n, t)   ETHR^t_{t+2} inside ETHR^t_n, identity on sets
///   ETHR=>NEQ     (n = m)  NEQ_m inside ETHR^{m-2}_m, x -> [m] \ {x}
///   MPOLY=>THR    (n, t, q) THR^t_n inside MPOLY^{n-t+1,q}_n
///   MPOLY=>OR_EQ  (n, q)   OR_EQ^q_n inside MPOLY^{n,q}_n
///   MPOLY=>NEQ    (n, d, q) NEQ_{C(n,d)} inside MPOLY^{d,q}_n
///   OR_EQ=>NEQ    (n, q)   NEQ_{2^n} inside OR_EQ^q_n, x -> bin(x), y -> bin(y) xor 1^n
///   THR=>THR1     (n, t)   THR^1_{n-t+1} inside THR^t_n
inline Reduction builtin_reduction(std::string_view name, const ReductionArgs& args) {
  using detail::make_reduction;
  const u64 n = args.n;
  const u64 t = args.t;
  auto bad = [&](const std::string& why) { fail(ErrorKind::BadParams, std::string(name) + ": " + why); };

  if (name == "DISJ=>INDEX") {
    const Domain sets = Domain::subsets(n);
    return make_reduction(std::string(name), args, Predicate::index(n), Predicate::disj(n),
                          [sets](u64 x) { return sets.index_of_subset(x); },
                          [sets](u64 i) { return sets.index_of_subset(u64{1} << i); });
  }
  if (name == "INDEX=>NEQ") {
    if (n > kMaxSetUniverse) bad("n too large");
    return make_reduction(std::string(name), args, Predicate::neq(n), Predicate::index(n),
                          [](u64 i) { return u64{1} << i; }, [](u64 j) { return j; });
  }
  if (name == "INDEX=>GT") {
    if (n < 1 || n > kMaxSetUniverse) bad("n out of range");
    return make_reduction(std::string(name), args, Predicate::gt(n), Predicate::index(n), [](u64 x) { return x; },
                          [](u64 y) { return detail::full_mask(y + 1); }, true);
  }
  if (name == "INDEX=>ANY") {
    if (!args.predicate) bad("needs a predicate");
    return detail::truth_table_reduction(*args.predicate);
  }
  if (name == "TABLE=>ANY") {
    if (!args.predicate) bad("needs a predicate");
    auto id = [](u64 v) { return v; };
    return make_reduction(std::string(name), args, *args.predicate, tabulate(*args.predicate), id, id);
  }
  if (name == "ETHR=>ETHR1") {
    if (t < 1 || t > n) bad("needs 1 <= t <= n");
    const u64 m = n - t + 1;
    auto pad = detail::pad_with_top(m, n);
    return make_reduction(std::string(name), args, Predicate::ethr(m, 1), Predicate::ethr(n, t), pad, pad);
  }
  if (name == "ETHR1=>GT") {
    const u64 m = n;
    const Domain sets = Domain::subsets(m);
    // x in [m+1] -> [x-1] (1 -> empty); y in [m] -> {y}, y = m+1 -> empty.
    auto f = [sets](u64 x) { return sets.index_of_subset(detail::full_mask(x)); };
    auto g = [sets, m](u64 y) { return sets.index_of_subset(y == m ? 0 : u64{1} << y); };
    return make_reduction(std::string(name), args, Predicate::gt(m + 1), Predicate::ethr(m, 1), f, g);
  }
  if (name == "ETHR=>ETHR_T2") {
    if (t < 1 || t + 2 > n) bad("needs 1 <= t and t + 2 <= n");
    const Domain small = Domain::subsets(t + 2);
    const Domain big = Domain::subsets(n);
    auto embed = [small, big](u64 i) { return big.index_of_subset(small.subset_at(i)); };
    return make_reduction(std::string(name), args, Predicate::ethr(t + 2, t), Predicate::ethr(n, t), embed, embed);
  }
  if (name == "ETHR=>NEQ") {
    const u64 m = n;
    if (m < 3) bad("needs m >= 3 so that m - 2 >= 1");
    const Domain sets = Domain::subsets(m);
    auto all_but = [sets, m](u64 x) { return sets.index_of_subset(detail::full_mask(m) & ~(u64{1} << x)); };
    return make_reduction(std::string(name), args, Predicate::neq(m), Predicate::ethr(m, m - 2), all_but, all_but);
  }
  if (name == "MPOLY=>THR") {
    if (t < 1 || t > n) bad("needs 1 <= t <= n");
    const auto degree = static_cast<unsigned>(n - t + 1);
    const Predicate target = Predicate::mpoly(n, degree, args.q);
    const Domain sets = Domain::subsets(n);
    const Domain points = target.x_domain();
    const Domain polys = target.y_domain();
    const u64 q = args.q;
    auto f = [sets, points, n](u64 s) {
      const u64 mask = sets.subset_at(s);
      std::vector<u64> chi(n);
      for (u64 i = 0; i < n; ++i) chi[i] = (mask >> i) & 1;
      return points.index_of_vector(chi);
    };
    auto g = [sets, polys, n, t, q](u64 s) { return polys.index_of_poly(threshold_poly(n, t, sets.subset_at(s), q)); };
    return make_reduction(std::string(name), args, Predicate::thr(n, t), target, f, g);
  }
  if (name == "MPOLY=>OR_EQ") {
    const Predicate target = Predicate::mpoly(n, static_cast<unsigned>(n), args.q);
    const Domain points = target.x_domain();
    const Domain polys = target.y_domain();
    const u64 q = args.q;
    return make_reduction(std::string(name), args, Predicate::oreq(n, q), target, [](u64 x) { return x; },
                          [points, polys, q](u64 y) { return polys.index_of_poly(disagreement_poly(points.vector_at(y), q)); });
  }
  if (name == "MPOLY=>NEQ") {
    const unsigned d = args.d;
    if (d > n) bad("needs d <= n");
    const Predicate target = Predicate::mpoly(n, d, args.q);
    const Domain points = target.x_domain();
    const Domain polys = target.y_domain();
    const u64 first = binomial_prefix(n, d) - binomial(n, d);  // rank of the first size-d subset
    const u64 q = args.q;
    // S(i) is the i-th size-d subset in lexicographic order.
    auto f = [points, first, n](u64 x) {
      const u64 mask = Domain::subset_by_rank(n, first + x);
      std::vector<u64> chi(n);
      for (u64 i = 0; i < n; ++i) chi[i] = (mask >> i) & 1;
      return points.index_of_vector(chi);
    };
    auto g = [polys, first, n, d, q](u64 y) {
      MultilinearPoly p{static_cast<unsigned>(n), d, q, {}};
      p.add_term(Domain::subset_by_rank(n, first + y), 1);
      return polys.index_of_poly(p);
    };
    return make_reduction(std::string(name), args, Predicate::neq(binomial(n, d)), target, f, g);
  }
  if (name == "OR_EQ=>NEQ") {
    if (n > kMaxSetUniverse) bad("n too large");
    const Predicate target = Predicate::oreq(n, args.q);
    const Domain points = target.x_domain();
    auto bin = [points, n](u64 v, bool flip) {
      std::vector<u64> bits(n);
      for (u64 i = 0; i < n; ++i) bits[i] = ((v >> (n - 1 - i)) & 1) ^ (flip ? 1 : 0);
      return points.index_of_vector(bits);
    };
    return make_reduction(std::string(name), args, Predicate::neq(u64{1} << n), target,
                          [bin](u64 x) { return bin(x, false); }, [bin](u64 y) { return bin(y, true); });
  }
  if (name == "THR=>THR1") {
    if (t < 1 || t > n) bad("needs 1 <= t <= n");
    const u64 m = n - t + 1;
    auto pad = detail::pad_with_top(m, n);
    return make_reduction(std::string(name), args, Predicate::thr(m, 1), Predicate::thr(n, t), pad, pad);
  }
  fail(ErrorKind::BadParams, "unknown reduction '" + std::string(name) + "'");
}

/// Chains inner (P2 => P1) with outer (P3 => P2) into P3 => P1.
inline Reduction compose(const Reduction& inner, const Reduction& outer) {
  if (!(inner.target == outer.source))
    fail(ErrorKind::BadParams, "cannot chain " + inner.name + " into " + outer.name);
  Reduction r{outer.name + " . " + inner.name, inner.args, inner.source, outer.target, {}, {}, inner.swapped != outer.swapped};
  // Each of inner's maps lands on one side of P2; push it through outer's
  // map for that side.
  auto through = [&](const std::function<u64(u64)>& m, bool lands_on_y) -> std::function<u64(u64)> {
    const auto next = lands_on_y ? outer.g : outer.f;
    return [m, next](u64 v) { return next(m(v)); };
  };
  r.f = through(inner.f, inner.swapped);
  r.g = through(inner.g, !inner.swapped);
  return r;
}

/// Exhaustively checks target(f(x), g(y)) = source(x, y).
inline bool verify_reduction(const Reduction& r, u64 cap = kDefaultCellCap) {
  const u64 cells = cell_count(r.source);
  if (cells > cap) fail(ErrorKind::TooLarge, r.name + " spans " + std::to_string(cells) + " pairs");
  const u64 xs = r.source.x_domain().size();
  const u64 ys = r.source.y_domain().size();
  std::vector<u64> gy(ys);
  for (u64 y = 0; y < ys; ++y) gy[y] = r.g(y);
  for (u64 x = 0; x < xs; ++x) {
    const u64 fx = r.f(x);
    for (u64 y = 0; y < ys; ++y) {
      const bool lifted = r.swapped ? r.target.eval(gy[y], fx) : r.target.eval(fx, gy[y]);
      if (lifted != r.source.eval(x, y)) return false;
    }
  }
  return true;
}

/// Encoding of r.source from an encoding of r.target; same length and q.
inline Encoding apply_reduction(const Reduction& r, const Encoding& e) {
  const u64 tx = r.target.x_domain().size();
  const u64 ty = r.target.y_domain().size();
  if (e.x_count != tx || e.y_count != ty)
    fail(ErrorKind::DomainMismatch, "encoding does not cover the domains of " + r.target.name());
  if ((r.target.id() == PredicateId::MPOLY || r.target.id() == PredicateId::OR_EQ) && r.target.q() != e.q)
    fail(ErrorKind::ModulusMismatch, r.target.name() + " is defined over Z_" + std::to_string(r.target.q()) +
                                         " but the encoding works modulo " + std::to_string(e.q));
  Encoding out;
  out.q = e.q;
  out.factors = e.factors;
  out.length = e.length;
  out.x_count = r.source.x_domain().size();
  out.y_count = r.source.y_domain().size();
  const auto ex = e.x;
  const auto ey = e.y;
  const auto f = r.f;
  const auto g = r.g;
  if (r.swapped) {
    out.x = [ey, f](u64 x) { return ey(f(x)); };
    out.y = [ex, g](u64 y) { return ex(g(y)); };
  } else {
    out.x = [ex, f](u64 x) { return ex(f(x)); };
    out.y = [ey, g](u64 y) { return ey(g(y)); };
  }
  out.provenance = e.provenance + " via " + r.name;
  return out;
}

}  // namespace ipe
