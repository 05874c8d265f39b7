#pragma once

// JSON forms of the library's values. Objects use nlohmann's default
// std::map storage, so keys are always emitted in sorted order.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipe/bounds.hpp"
#include "ipe/encoding.hpp"
#include "ipe/error.hpp"
#include "ipe/predicates.hpp"
#include "ipe/randomized.hpp"
#include "ipe/zqlinalg.hpp"

namespace ipe {

using json = nlohmann::json;

namespace detail {

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Parse, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.is_object() && j.contains(key) ? get_field<T>(j, key) : fallback;
}

}  // namespace detail

/// Pretty-printed with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

// --- Matrix ---------------------------------------------------------------

inline json to_json(const ZqMatrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"q", m.modulus()},
          {"entries", std::vector<u64>(m.entries().begin(), m.entries().end())}};
}

inline ZqMatrix matrix_from_json(const json& j) {
  const auto rows = detail::get_field<std::size_t>(j, "rows");
  const auto cols = detail::get_field<std::size_t>(j, "cols");
  if (rows == 0 || cols == 0) fail(ErrorKind::Parse, "matrix dimensions must be positive");
  return ZqMatrix(rows, cols, detail::get_field<u64>(j, "q"), detail::get_field<std::vector<u64>>(j, "entries"));
}

// --- Predicate ------------------------------------------------------------

inline json to_json(const Predicate& p) {
  json j{{"id", std::string(to_string(p.id()))}};
  switch (p.id()) {
    case PredicateId::ETHR:
    case PredicateId::THR: j["n"] = p.n(); j["t"] = p.t(); break;
    case PredicateId::MPOLY: j["n"] = p.n(); j["d"] = p.d(); j["q"] = p.q(); break;
    case PredicateId::OR_EQ: j["n"] = p.n(); j["q"] = p.q(); break;
    case PredicateId::TABLE: {
      j["rows"] = p.table_rows();
      j["cols"] = p.table_cols();
      std::vector<int> bits(p.table_bits().begin(), p.table_bits().end());
      j["bits"] = bits;
      break;
    }
    default: j["n"] = p.n();
  }
  return j;
}

inline Predicate predicate_from_json(const json& j) {
  const PredicateId id = predicate_id_from_string(detail::get_field<std::string>(j, "id"));
  switch (id) {
    case PredicateId::EQ: return Predicate::eq(detail::get_field<u64>(j, "n"));
    case PredicateId::GT: return Predicate::gt(detail::get_field<u64>(j, "n"));
    case PredicateId::NEQ: return Predicate::neq(detail::get_field<u64>(j, "n"));
    case PredicateId::INDEX: return Predicate::index(detail::get_field<u64>(j, "n"));
    case PredicateId::DISJ: return Predicate::disj(detail::get_field<u64>(j, "n"));
    case PredicateId::ETHR: return Predicate::ethr(detail::get_field<u64>(j, "n"), detail::get_field<u64>(j, "t"));
    case PredicateId::THR: return Predicate::thr(detail::get_field<u64>(j, "n"), detail::get_field<u64>(j, "t"));
    case PredicateId::MPOLY:
      return Predicate::mpoly(detail::get_field<u64>(j, "n"), detail::get_field<unsigned>(j, "d"),
                              detail::get_field<u64>(j, "q"));
    case PredicateId::OR_EQ: return Predicate::oreq(detail::get_field<u64>(j, "n"), detail::get_field<u64>(j, "q"));
    case PredicateId::TABLE: {
      const auto bits = detail::get_field<std::vector<int>>(j, "bits");
      const u64 rows = detail::get_field<u64>(j, "rows");
      const u64 cols = detail::get_or<u64>(j, "cols", rows == 0 ? 0 : bits.size() / rows);
      std::vector<std::uint8_t> b;
      for (int v : bits) {
        if (v != 0 && v != 1) fail(ErrorKind::Parse, "TABLE bits must be 0 or 1");
        b.push_back(static_cast<std::uint8_t>(v));
      }
      return Predicate::table(rows, cols, std::move(b));
    }
  }
  fail(ErrorKind::Parse, "unknown predicate id");
}

// --- Encoding ---------------------------------------------------------------

inline json to_json(const Encoding& e, u64 cap = kDefaultCellCap) {
  if (e.x_count > cap || e.y_count > cap) fail(ErrorKind::TooLarge, "encoding domain too large to serialize");
  json xs = json::object(), ys = json::object();
  for (u64 i = 0; i < e.x_count; ++i) xs[std::to_string(i)] = e.x(i);
  for (u64 i = 0; i < e.y_count; ++i) ys[std::to_string(i)] = e.y(i);
  return {{"q", e.q}, {"factors", e.factors}, {"length", e.length}, {"x", xs}, {"y", ys},
          {"provenance", e.provenance}};
}

inline Encoding encoding_from_json(const json& j) {
  const u64 q = detail::get_field<u64>(j, "q");
  const auto length = detail::get_field<std::size_t>(j, "length");
  auto side = [&](const char* key) {
    const json& m = j.contains(key) ? j.at(key) : json();
    if (!m.is_object()) fail(ErrorKind::Parse, std::string("field '") + key + "' must be an object");
    std::vector<Vec> table(m.size());
    std::vector<char> seen(m.size(), 0);
    for (const auto& [k, v] : m.items()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoull(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        fail(ErrorKind::Parse, std::string("bad index '") + k + "' in '" + key + "'");
      }
      if (idx >= table.size() || seen[idx])
        fail(ErrorKind::Parse, std::string("indices in '") + key + "' must be exactly 0.." + std::to_string(m.size() - 1));
      seen[idx] = 1;
      try {
        table[idx] = v.get<Vec>();
      } catch (const json::exception& e) {
        fail(ErrorKind::Parse, e.what());
      }
    }
    return table;
  };
  Encoding e = from_tables(q, length, side("x"), side("y"), detail::get_or<std::string>(j, "provenance", "file"));
  return e;
}

// --- Verification -----------------------------------------------------------

inline json to_json(const VerificationReport& r) {
  json mism = json::array();
  for (const Mismatch& m : r.mismatches)
    mism.push_back({{"x", m.x}, {"y", m.y}, {"inner_product", m.inner_product}, {"expected", m.expected}});
  return {{"ok", r.ok()}, {"checked_pairs", r.checked_pairs}, {"mismatches", mism}};
}

// --- Certificates -----------------------------------------------------------

inline json to_json(const ReductionArgs& a) {
  json j{{"n", a.n}, {"t", a.t}, {"d", a.d}, {"q", a.q}};
  if (a.predicate) j["predicate"] = to_json(*a.predicate);
  return j;
}

inline ReductionArgs reduction_args_from_json(const json& j) {
  ReductionArgs a;
  a.n = detail::get_or<u64>(j, "n", 0);
  a.t = detail::get_or<u64>(j, "t", 0);
  a.d = detail::get_or<unsigned>(j, "d", 0);
  a.q = detail::get_or<u64>(j, "q", 0);
  if (j.contains("predicate")) a.predicate = predicate_from_json(j.at("predicate"));
  return a;
}

inline json to_json(const Certificate& c) {
  json w = std::visit(
      [](const auto& wit) -> json {
        using W = std::decay_t<decltype(wit)>;
        if constexpr (std::is_same_v<W, MinRankWitness>) {
          return {{"prime", wit.prime}, {"matrix", to_json(wit.matrix)}};
        } else if constexpr (std::is_same_v<W, TriangularWitness>) {
          return {{"row_order", wit.row_order}, {"col_order", wit.col_order}, {"diag_len", wit.diag_len}};
        } else if constexpr (std::is_same_v<W, DiagonalWitness>) {
          return {{"col_of_row", wit.col_of_row}};
        } else if constexpr (std::is_same_v<W, LiftWitness>) {
          return {{"reduction", wit.reduction}, {"args", to_json(wit.args)}, {"inner", to_json(*wit.inner)}};
        } else {
          return {{"n", wit.n}, {"d", wit.d}, {"q", wit.q}};
        }
      },
      c.witness);
  return {{"predicate", to_json(c.predicate)}, {"q", c.modulus.q()}, {"factors", std::vector<u64>(c.modulus.factors().begin(), c.modulus.factors().end())},
          {"bound", c.bound}, {"method", std::string(to_string(c.method))}, {"witness", w}};
}

inline Certificate certificate_from_json(const json& j) {
  const Predicate pred = predicate_from_json(j.contains("predicate") ? j.at("predicate") : json());
  const Modulus m = factorize(detail::get_field<u64>(j, "q"));
  const u64 bound = detail::get_field<u64>(j, "bound");
  const BoundMethod method = bound_method_from_string(detail::get_field<std::string>(j, "method"));
  const json w = j.contains("witness") ? j.at("witness") : json::object();
  Witness wit;
  switch (method) {
    case BoundMethod::ExactMinRank:
      wit = MinRankWitness{detail::get_field<u64>(w, "prime"), matrix_from_json(w.contains("matrix") ? w.at("matrix") : json())};
      break;
    case BoundMethod::TriangularPigeonhole:
      wit = TriangularWitness{detail::get_field<std::vector<std::size_t>>(w, "row_order"),
                              detail::get_field<std::vector<std::size_t>>(w, "col_order"),
                              detail::get_field<std::size_t>(w, "diag_len")};
      break;
    case BoundMethod::DiagonalNonzero:
      wit = DiagonalWitness{detail::get_field<std::vector<std::size_t>>(w, "col_of_row")};
      break;
    case BoundMethod::ReductionLift:
      wit = LiftWitness{detail::get_field<std::string>(w, "reduction"),
                        reduction_args_from_json(w.contains("args") ? w.at("args") : json::object()),
                        std::make_shared<const Certificate>(certificate_from_json(w.contains("inner") ? w.at("inner") : json()))};
      break;
    case BoundMethod::CountingMPOLY:
      wit = CountingWitness{detail::get_field<u64>(w, "n"), detail::get_field<unsigned>(w, "d"),
                            detail::get_field<u64>(w, "q")};
      break;
  }
  return {pred, m, bound, method, std::move(wit)};
}

// --- Randomized -------------------------------------------------------------

inline json to_json(const ErrorReport& r) {
  json j{{"mode", r.mode == ErrorMode::Exact ? "exact" : "monte_carlo"},
         {"worst_pair_error", r.worst_pair_error},
         {"worst_pair", {r.worst_pair.first, r.worst_pair.second}},
         {"avg_error", r.avg_error},
         {"trials", r.trials},
         {"pairs", r.pairs}};
  if (r.mode == ErrorMode::MonteCarlo) j["radius_3sigma"] = r.radius;
  return j;
}

// --- Rank factorization -----------------------------------------------------

inline json to_json(const RankFactorization& f) {
  return {{"rank", f.rank}, {"p", f.p}, {"pivot_columns", f.pivot_columns}, {"U", to_json(f.u)}, {"V", to_json(f.v)}};
}

}  // namespace ipe
