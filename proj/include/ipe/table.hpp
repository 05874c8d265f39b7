#pragma once

// Desk-scale summary of upper and lower bounds: for each predicate family a
// constructed (and exhaustively verified) encoding length next to a
// certified lower bound, compared against the closed-form values.

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ipe/bounds.hpp"
#include "ipe/encoders.hpp"
#include "ipe/encoding.hpp"
#include "ipe/modmath.hpp"
#include "ipe/predicates.hpp"

namespace ipe {

enum class CellStatus { Match, Sharper, NoClosedForm, NotApplicable, Mismatch };

inline constexpr std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Match: return "match";
    case CellStatus::Sharper: return "sharper";
    case CellStatus::NoClosedForm: return "no closed form";
    case CellStatus::NotApplicable: return "n/a";
    case CellStatus::Mismatch: return "MISMATCH";
  }
  return "?";
}

struct TableRow {
  std::string predicate;
  u64 q = 0;
  u64 k = 0;
  std::optional<u64> upper;  // length of the verified construction
  std::optional<u64> lower;  // certified bound
  std::optional<u64> formula_upper;
  std::optional<u64> formula_lower;
  std::string formula_upper_text;
  std::string formula_lower_text;
  std::string verified;  // "yes", "no", "skipped"
  std::string method;
  std::string note;

  CellStatus upper_status() const {
    if (!upper) return CellStatus::NotApplicable;
    if (!formula_upper) return CellStatus::NoClosedForm;
    if (*upper == *formula_upper) return CellStatus::Match;
    return *upper < *formula_upper ? CellStatus::Sharper : CellStatus::Mismatch;
  }

  CellStatus lower_status() const {
    if (!lower) return CellStatus::NotApplicable;
    if (!formula_lower) return CellStatus::NoClosedForm;
    if (*lower == *formula_lower) return CellStatus::Match;
    return *lower > *formula_lower ? CellStatus::Sharper : CellStatus::Mismatch;
  }

  /// Lower bound above the construction, or a failed verification.
  bool sound() const { return verified != "no" && (!upper || !lower || *lower <= *upper); }
};

namespace detail {

inline u64 smallest_prime_at_least(u64 v) { return is_prime(v) ? v : next_prime_above(v); }

struct RowSpec {
  Predicate predicate;
  Modulus modulus;
  std::function<Encoding()> encode;  // empty when no construction applies
  std::optional<u64> formula_upper;
  std::optional<u64> formula_lower;
  std::string formula_upper_text;
  std::string formula_lower_text;
  std::string note;
};

inline TableRow evaluate_row(const RowSpec& s, u64 cap) {
  TableRow row;
  row.predicate = s.predicate.name();
  row.q = s.modulus.q();
  row.k = s.modulus.k();
  row.formula_upper = s.formula_upper;
  row.formula_lower = s.formula_lower;
  row.formula_upper_text = s.formula_upper_text;
  row.formula_lower_text = s.formula_lower_text;
  row.note = s.note;
  row.verified = "skipped";
  if (s.encode) {
    const Encoding e = s.encode();
    row.upper = e.length;
    if (cell_count(s.predicate) <= cap) row.verified = verify(s.predicate, e, cap).ok() ? "yes" : "no";
  }
  const Certificate c = builtin_bound(s.predicate, s.modulus, cap);
  row.lower = c.bound;
  row.method = std::string(to_string(c.method));
  return row;
}

inline std::string fmt_opt(const std::optional<u64>& v) { return v ? std::to_string(*v) : "-"; }

}  // namespace detail

/// Rows at sizes derived from max_n (2 <= max_n <= 8).
inline std::vector<TableRow> build_table(u64 max_n, u64 cap = u64{1} << 22) {
  if (max_n < 2 || max_n > 8) fail(ErrorKind::BadParams, "table supports 2 <= max-n <= 8");
  using detail::RowSpec;
  const u64 n = max_n;
  const Modulus two = factorize(2);
  const u64 q_big = detail::smallest_prime_at_least(std::max<u64>(n + 1, 11));
  const Modulus prime = factorize(q_big);
  const Modulus comp = factorize(n >= 3 ? 30 : 6);
  const u64 kc = comp.k();
  const std::string nk = "ceil(n/k)";
  std::vector<RowSpec> specs;

  // EQ
  specs.push_back({Predicate::eq(n), two, [n] { return encode_eq_mod2(n); }, n, n - 1, "n", "n-1",
                   n % 2 == 0 ? "exact rank of J-I over Z_2 is n for even n, sharper than n-1" : ""});
  const Modulus eq_prime = factorize(detail::smallest_prime_at_least(n));
  specs.push_back({Predicate::eq(n), eq_prime, [n, q = eq_prime.q()] { return encode_eq_large_q(n, q); }, 2,
                   std::nullopt, "2 (q >= n)", "asymptotic only", "lower bound from a 2x2 triangular block"});
  specs.push_back({Predicate::eq(n), comp, [n, q = comp.q()] { return encode_eq_large_q(n, q); }, 2, std::nullopt,
                   "2 (q >= n)", "asymptotic only", "lower bound from a 2x2 triangular block"});

  // GT
  specs.push_back({Predicate::gt(n), prime, [n, q = q_big] { return encode_gt_prime(n, q); }, n, n, "n", "n", ""});
  std::vector<u64> gt_composites{6};
  if (comp.q() != 6) gt_composites.push_back(comp.q());
  for (u64 qc : gt_composites) {
    const Modulus m = factorize(qc);
    specs.push_back({Predicate::gt(n), m, [n, m] { return encode_gt(n, m); }, ceil_div(n, m.k()), ceil_div(n, m.k()),
                     nk, nk, ""});
  }

  // INDEX, NEQ
  specs.push_back({Predicate::index(n), prime, [n, prime] { return encode_index(n, prime); }, n, n, "n", "n", ""});
  specs.push_back({Predicate::index(n), comp, [n, comp] { return encode_index(n, comp); }, ceil_div(n, kc),
                   ceil_div(n, kc), nk, nk, ""});
  specs.push_back({Predicate::neq(n), prime, [n, prime] { return encode_neq(n, prime); }, n, n, "n", "n", ""});
  specs.push_back({Predicate::neq(n), comp, [n, comp] { return encode_neq(n, comp); }, ceil_div(n, kc),
                   ceil_div(n, kc), nk, nk, ""});

  // DISJ builds its own modulus.
  for (u64 k : {u64{1}, u64{2}}) {
    const DisjointnessEncoding d = encode_disj(n, k);
    specs.push_back({Predicate::disj(n), d.modulus, [d] { return d.encoding; }, ceil_div(n, k), ceil_div(n, k),
                     k == 1 ? "n" : nk, k == 1 ? "n" : nk, "q chosen by the prime tower"});
  }

  // ETHR
  const Modulus ethr_prime = factorize(detail::smallest_prime_at_least(n + 2));
  if (n >= 3) {
    const u64 t = std::max<u64>(1, std::min<u64>(n / 2, n - 2));
    for (const Modulus& m : {ethr_prime, comp}) {
      specs.push_back({Predicate::ethr(n, t), m, [n, t, q = m.q()] { return encode_ethr(n, t, q); }, n + 1,
                       ceil_div(n, 2 * m.k()), "n+1", m.k() == 1 ? "ceil(n/2)" : "ceil(n/2k)",
                       "certified max{n-t+2, t+2}/k is sharper than n/2k"});
    }
  }
  specs.push_back({Predicate::ethr(n, n - 1), ethr_prime, [n, q = ethr_prime.q()] { return encode_ethr(n, n - 1, q); },
                   3, std::nullopt, "3 (t = n-1, q >= n+2)", "-", ""});
  specs.push_back({Predicate::ethr(n, n), ethr_prime, [n, q = ethr_prime.q()] { return encode_ethr(n, n, q); }, 2,
                   std::nullopt, "2 (t = n)", "-", ""});

  // MPOLY: the modulus is the polynomial ring's q.
  {
    const u64 mn = std::min<u64>(n, 3);
    const unsigned d = 2;
    const u64 len = binomial_prefix(mn, d);
    specs.push_back({Predicate::mpoly(mn, d, 3), factorize(3), [mn, d] { return encode_mpoly(mn, d, 3); }, len, len,
                     "C(n,<=d)", "C(n,<=d)", "closed forms of the n^d entries"});
    const u64 cn = 2;
    const unsigned cd = 1;
    specs.push_back({Predicate::mpoly(cn, cd, 6), factorize(6), [cn, cd] { return encode_mpoly(cn, cd, 6); },
                     binomial_prefix(cn, cd), ceil_div(binomial(cn, cd), 2), "C(n,<=d)", "ceil(C(n,d)/k)",
                     "closed forms of the n^d entries"});
  }

  // THR
  {
    const u64 tn = std::min<u64>(n, 5);
    const u64 t = tn - 1;
    const u64 deg = tn - t + 1;
    const Modulus p = factorize(detail::smallest_prime_at_least(tn + 1));
    const Modulus c = factorize(77);
    specs.push_back({Predicate::thr(tn, t), p, [tn, t, q = p.q()] { return encode_thr(tn, t, q); },
                     binomial_prefix(tn, deg), u64{1} << deg, "C(n,<=n-t+1)", "2^(n-t+1)",
                     "upper is the closed form of O(n^(n-t+1))"});
    specs.push_back({Predicate::thr(tn, t), c, [tn, t] { return encode_thr(tn, t, 77); }, binomial_prefix(tn, deg),
                     ceil_div(u64{1} << deg, 2), "C(n,<=n-t+1)", "ceil(2^(n-t+1)/k)",
                     "upper is the closed form of O(n^(n-t+1))"});
  }

  // OR_EQ
  {
    const u64 on = 2;
    specs.push_back({Predicate::oreq(on, 3), factorize(3), [on] { return encode_oreq(on, 3); }, u64{1} << on,
                     u64{1} << on, "2^n", "2^n", ""});
    specs.push_back({Predicate::oreq(on, 6), factorize(6), {}, u64{1} << on, ceil_div(u64{1} << on, 2), "2^n",
                     "ceil(2^n/k)",
                     "no construction: prod (x_i - y_i) can vanish mod a composite q with every factor nonzero"});
  }

  std::vector<TableRow> rows;
  rows.reserve(specs.size());
  for (const RowSpec& s : specs) rows.push_back(detail::evaluate_row(s, cap));
  return rows;
}

inline std::string render_markdown(const std::vector<TableRow>& rows, u64 max_n) {
  std::ostringstream out;
  out << "# Inner product encoding bounds (max n = " << max_n << ")\n\n";
  out << "| predicate | q | k | upper | lower | formula upper | formula lower | upper status | lower status | "
         "verified | lower method |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  std::vector<std::string> notes;
  for (const TableRow& r : rows) {
    std::string mark;
    if (!r.note.empty()) {
      auto it = std::find(notes.begin(), notes.end(), r.note);
      if (it == notes.end()) it = notes.insert(notes.end(), r.note);
      mark = " [" + std::to_string(it - notes.begin() + 1) + "]";
    }
    auto formula = [](const std::optional<u64>& v, const std::string& text) {
      return v ? std::to_string(*v) + " = " + text : text;
    };
    out << "| " << r.predicate << mark << " | " << r.q << " | " << r.k << " | " << detail::fmt_opt(r.upper) << " | "
        << detail::fmt_opt(r.lower) << " | " << formula(r.formula_upper, r.formula_upper_text) << " | "
        << formula(r.formula_lower, r.formula_lower_text) << " | " << to_string(r.upper_status()) << " | "
        << to_string(r.lower_status()) << " | " << r.verified << " | " << r.method << " |\n";
  }
  if (!notes.empty()) {
    out << "\n";
    for (std::size_t i = 0; i < notes.size(); ++i) out << "[" << i + 1 << "] " << notes[i] << "\n";
  }
  return out.str();
}

}  // namespace ipe
