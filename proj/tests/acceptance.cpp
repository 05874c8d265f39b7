// Acceptance checks AC1-AC8. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ipe/ipe.hpp"
#include "test_util.hpp"

using namespace ipe;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail << what;
    ok = ok && cond;
  }
};

struct GridRow {
  Predicate pred;
  Modulus modulus;
  std::function<Encoding()> encode;
  bool tight;
};

/// The exhaustive grid of AC1, reused by the soundness sweep.
std::vector<GridRow> acceptance_grid() {
  std::vector<GridRow> g;
  const Modulus p11 = factorize(11), p7 = factorize(7), p5 = factorize(5), q30 = factorize(30);
  for (u64 n = 1; n <= 8; ++n) {
    g.push_back({Predicate::eq(n), factorize(2), [n] { return encode_eq_mod2(n); }, false});
    g.push_back({Predicate::eq(n), p11, [n] { return encode_eq_large_q(n, 11); }, false});
    g.push_back({Predicate::gt(n), p11, [n] { return encode_gt_prime(n, 11); }, true});
    g.push_back({Predicate::neq(n), p11, [n, p11] { return encode_neq(n, p11); }, true});
    if (n >= 3) g.push_back({Predicate::neq(n), q30, [n, q30] { return encode_neq(n, q30); }, true});
  }
  const std::vector<u64> primorials{2, 6, 30, 210};
  for (u64 n = 1; n <= 4; ++n) {
    const Modulus m = factorize(primorials[n - 1]);
    g.push_back({Predicate::gt(n), m, [n, m] { return encode_gt_kprimes(n, m); }, true});
  }
  g.push_back({Predicate::gt(6), q30, [q30] { return encode_gt(6, q30); }, true});
  g.push_back({Predicate::index(6), q30, [q30] { return encode_index(6, q30); }, true});
  for (u64 k : {u64{1}, u64{2}}) {
    const DisjointnessEncoding d = encode_disj(4, k);
    g.push_back({Predicate::disj(4), d.modulus, [d] { return d.encoding; }, true});
  }
  for (u64 n = 1; n <= 5; ++n)
    for (u64 t = 1; t <= n; ++t) {
      g.push_back({Predicate::ethr(n, t), p7, [n, t] { return encode_ethr(n, t, 7); }, false});
      g.push_back({Predicate::ethr(n, t), p7, [n, t] { return encode_ethr(n, t, 7, EthrForm::General); }, false});
    }
  for (unsigned d = 0; d <= 2; ++d)
    g.push_back({Predicate::mpoly(2, d, 3), factorize(3), [d] { return encode_mpoly(2, d, 3); }, false});
  for (u64 t = 1; t <= 4; ++t) g.push_back({Predicate::thr(4, t), p5, [t] { return encode_thr(4, t, 5); }, false});
  for (u64 q : {3u, 5u})
    for (u64 n = 1; n <= 2; ++n)
      g.push_back({Predicate::oreq(n, q), factorize(q), [n, q] { return encode_oreq(n, q); }, true});
  return g;
}

void ac1(Outcome& o) {
  for (const GridRow& r : acceptance_grid()) {
    const Encoding e = r.encode();
    const auto rep = verify(r.pred, e);
    o.expect(rep.ok(), r.pred.name() + " q=" + std::to_string(r.modulus.q()) + " has mismatches; ");
    if (r.pred.id() == PredicateId::DISJ) {
      o.expect(rep.checked_pairs == 256, "DISJ_4 pair count; ");
      o.expect(e.length == (r.modulus.k() == 1 ? 4u : 2u), "DISJ_4 length; ");
      o.expect(r.modulus.q() == (r.modulus.k() == 1 ? 5u : 305u), "DISJ_4 modulus; ");
    }
    if (r.pred.id() == PredicateId::INDEX) o.expect(e.length == 2, "INDEX_6 length; ");
    if (r.pred.id() == PredicateId::THR)
      o.expect(e.length == binomial_prefix(4, 4 - r.pred.t() + 1), "THR_4 length; ");
    if (r.pred.id() == PredicateId::OR_EQ)
      o.expect(rep.checked_pairs == checked_pow(r.pred.q(), 2 * r.pred.n()), "OR_EQ pair count; ");
  }
}

void ac2(Outcome& o) {
  for (u64 n = 1; n <= 4; ++n) {
    for (u64 p : {2u, 3u, 5u})
      o.expect(min_rank_oracle(zero_pattern(Predicate::gt(n)), p) == n, "GT oracle; ");
    for (u64 p : {2u, 3u})
      o.expect(min_rank_oracle(zero_pattern(Predicate::neq(n)), p) == n, "NEQ oracle; ");
  }
  for (u64 n = 1; n <= 3; ++n)
    o.expect(min_rank_oracle(zero_pattern(Predicate::index(n)), 2) == n, "INDEX oracle; ");
}

void ac3(Outcome& o) {
  const ZqMatrix jmi = ZqMatrix::from_rows(2, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const Encoding eq3 = encode_from_matrix(Predicate::eq(3), jmi, 2);
  o.expect(eq3.length == 2 && verify(Predicate::eq(3), eq3).ok(), "EQ_3 from J-I; ");
  std::mt19937_64 rng(20240601);
  int done = 0;
  for (int i = 0; i < 200; ++i) {
    const Predicate pred = i % 2 == 0 ? Predicate::gt(4) : Predicate::neq(4);
    const u64 p = std::vector<u64>{2, 3, 5}[(i / 2) % 3];
    const ZqMatrix f = test_support::random_representing(zero_pattern(pred), p, rng);
    const Encoding e = encode_from_matrix(pred, f, p);
    o.expect(e.length == rank_mod_p(f, p), "length != rank; ");
    o.expect(verify(pred, e).ok(), pred.name() + " from matrix fails; ");
    ++done;
  }
  o.detail << (o.ok ? std::to_string(done) + " random matrices" : "");
}

void ac4(Outcome& o) {
  const ZeroPattern z = zero_pattern(Predicate::gt(6));
  std::mt19937_64 rng(77);
  for (u64 q : {6u, 30u}) {
    const Modulus m = factorize(q);
    const u64 want = ceil_div(6, m.k());
    o.expect(triangular_bound(z, m, identity_witness(6, 6)).bound == want, "triangular_bound; ");
    for (int i = 0; i < 100; ++i) {
      const ZqMatrix f = test_support::random_representing(z, q, rng);
      o.expect(pigeonhole_factor(f, identity_witness(6, 6), m).diagonal_indices.size() >= want, "pigeonhole; ");
    }
  }
}

void ac5(Outcome& o) {
  u64 rows = 0, tight = 0;
  for (const GridRow& r : acceptance_grid()) {
    const Encoding e = r.encode();
    const Certificate c = builtin_bound(r.pred, r.modulus);
    const std::string tag = r.pred.name() + " q=" + std::to_string(r.modulus.q());
    o.expect(c.bound <= e.length, tag + " bound exceeds length; ");
    o.expect(check(c, r.modulus), tag + " certificate does not check; ");
    if (r.tight) {
      o.expect(c.bound == e.length, tag + " not tight; ");
      ++tight;
    }
    ++rows;
  }
  if (o.ok) o.detail << rows << " rows, " << tight << " tight";
}

void ac6(Outcome& o) {
  const auto eq = rand_encode_eq(1024, 7, Eps::make(1, 8));
  o.expect(eq.max_length == 9, "EQ length; ");
  o.expect(exact_error(eq).worst_pair_error == 0.125, "EQ exact error; ");
  const auto neq = rand_encode_neq(1024, 7, Eps::make(1, 8));
  o.expect(neq.max_length == 8, "NEQ length; ");
  o.expect(exact_error(neq).worst_pair_error == 0.125, "NEQ exact error; ");
  for (u64 seed = 0; seed < 1000; ++seed) {
    const Encoding a = sample(eq, seed), b = sample(neq, seed);
    for (u64 x = 0; x < 1024; ++x) {
      if (inner_product(a.x(x), a.y(x), 7) != 0 || inner_product(b.x(x), b.y(x), 7) == 0) {
        o.expect(false, "diagonal error at seed " + std::to_string(seed) + "; ");
        break;
      }
    }
  }
  const auto gt = rand_encode_gt(16, 11, Eps::make(1, 4));
  o.expect(gt.max_length == 65, "GT length; ");
  const ErrorReport mc = monte_carlo_error(gt, 100000, 42);
  o.expect(mc.worst_pair_error <= 0.25 + mc.radius, "GT Monte Carlo error; ");
  const auto small = rand_encode_gt_buckets(4, 11, 2);
  const ErrorReport en = enumerate_error(small);
  o.expect(small.m == 2 && en.worst_pair_error <= 2.0 / 2.0, "GT enumeration bound; ");
  o.expect(std::abs(en.worst_pair_error - exact_error(small).worst_pair_error) < 1e-12, "GT enumeration vs closed form; ");
  if (o.ok) o.detail << "GT MC worst " << mc.worst_pair_error << " +- " << mc.radius;
}

void ac7(Outcome& o) {
  std::mt19937_64 rng(9);
  for (u64 q : {6u, 30u, 105u}) {
    const Modulus m = factorize(q);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t len = 1 + rng() % 6;
      Vec a(len), b(len);
      for (std::size_t j = 0; j < len; ++j) {
        a[j] = rng() % q;
        b[j] = rng() % q;
      }
      bool all = true;
      for (u64 p : m.factors()) {
        Vec ap(a), bp(b);
        for (u64& v : ap) v %= p;
        for (u64& v : bp) v %= p;
        all = all && inner_product(ap, bp, p) == 0;
      }
      o.expect((inner_product(a, b, q) == 0) == all, "CRT violation at q=" + std::to_string(q) + "; ");
    }
  }
}

void ac8(Outcome& o) {
  const auto rows = build_table(6);
  const std::string md = render_markdown(rows, 6);
  for (const TableRow& r : rows) {
    const std::string tag = r.predicate + " q=" + std::to_string(r.q);
    o.expect(r.sound(), tag + " unsound; ");
    o.expect(r.upper_status() != CellStatus::Mismatch && r.lower_status() != CellStatus::Mismatch,
             tag + " mismatch; ");
  }
  o.expect(!rows.empty() && rows.front().predicate == "EQ_6" && rows.front().q == 2 &&
               rows.front().lower_status() == CellStatus::Sharper && !rows.front().note.empty(),
           "EQ q=2 row not annotated; ");
  o.expect(md.find("| EQ_6 [1] | 2 |") != std::string::npos, "markdown annotation; ");
  if (o.ok) o.detail << rows.size() << " rows";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"AC1 exhaustive correctness", ac1}, {"AC2 exact DI via oracle", ac2},
      {"AC3 matrix to encoding", ac3},     {"AC4 triangular pigeonhole", ac4},
      {"AC5 soundness sweep", ac5},        {"AC6 randomized suite", ac6},
      {"AC7 CRT property", ac7},           {"AC8 table --max-n 6", ac8},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.2fs) %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
    failed += o.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
