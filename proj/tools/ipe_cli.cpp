// ipe: command line front end for the inner product encoding library.
//
// Exit codes: 0 success, 1 verification failure / invalid certificate,
// 2 usage or parameter error, 3 enumeration cap or integer overflow.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "ipe/ipe.hpp"

namespace {

using namespace ipe;

struct PredicateFlags {
  std::string id;
  std::string file;
  u64 n = 0;
  u64 t = 0;
  unsigned d = 0;
};

struct Options {
  PredicateFlags pred;
  u64 q = 0;
  u64 k = 1;
  u64 p = 0;
  std::string form = "auto";
  std::string out;
  std::string enc;
  std::string matrix;
  std::string check;
  std::string from;
  std::string to;
  std::string name;
  std::string eps;
  std::string mode = "exact";
  std::optional<u64> seed;
  u64 trials = 10000;
  u64 cap = 64;
  u64 max_n = 6;
  bool factor = false;
  std::string u_out;
  std::string v_out;
};

u64 cell_cap() {
  if (const char* env = std::getenv("IPE_CAP_CELLS")) {
    try {
      std::size_t used = 0;
      const u64 v = std::stoull(env, &used);
      if (used == std::string(env).size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::BadParams, "IPE_CAP_CELLS must be a positive integer");
  }
  return kDefaultCellCap;
}

/// Writes via a temporary file and rename so readers never see a partial file.
void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::BadParams, "cannot write '" + path + "'");
    f << text;
    f.flush();
    if (!f) fail(ErrorKind::BadParams, "cannot write '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail(ErrorKind::BadParams, "cannot rename onto '" + path + "'");
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    write_atomic(out, text);
}

std::string upper_id(std::string s) {
  for (char& c : s) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

Predicate predicate_from(const Options& o) {
  if (!o.pred.file.empty()) return predicate_from_json(read_json_file(o.pred.file));
  if (o.pred.id.empty()) fail(ErrorKind::BadParams, "--predicate or --pred-file is required");
  json j{{"id", o.pred.id}, {"n", o.pred.n}, {"t", o.pred.t}, {"d", o.pred.d}, {"q", o.q}};
  return predicate_from_json(j);
}

u64 require_q(const Options& o) {
  if (o.q < 2) fail(ErrorKind::BadParams, "--q is required");
  return o.q;
}

int run_encode(const Options& o) {
  const Predicate p = predicate_from(o);
  const EthrForm form = o.form == "general" ? EthrForm::General : EthrForm::Auto;
  const u64 q = p.id() == PredicateId::DISJ ? 0 : require_q(o);
  const Encoding e = encode_builtin(p, q, o.k, form);
  const json enc = to_json(e, cell_cap());
  if (o.out.empty()) {
    emit(dump(enc), "");
    return 0;
  }
  emit(dump(enc), o.out);
  std::cout << dump({{"predicate", to_json(p)}, {"q", e.q}, {"factors", e.factors}, {"length", e.length},
                     {"provenance", e.provenance}, {"out", o.out}});
  return 0;
}

int run_verify(const Options& o) {
  const Predicate p = predicate_from(o);
  const Encoding e = encoding_from_json(read_json_file(o.enc));
  const VerificationReport r = verify(p, e, cell_cap());
  emit(dump(to_json(r)), o.out);
  return r.ok() ? 0 : 1;
}

int run_bound(const Options& o) {
  if (!o.check.empty()) {
    const Certificate c = certificate_from_json(read_json_file(o.check));
    const bool valid = check(c, c.modulus);
    std::cout << dump({{"valid", valid}, {"bound", c.bound}, {"method", std::string(to_string(c.method))},
                       {"predicate", to_json(c.predicate)}, {"q", c.modulus.q()}});
    return valid ? 0 : 1;
  }
  const Predicate p = predicate_from(o);
  const Certificate c = builtin_bound(p, factorize(require_q(o)), cell_cap());
  emit(dump(to_json(c)), o.out);
  return 0;
}

int run_minrank(const Options& o) {
  const Predicate p = predicate_from(o);
  if (o.p < 2) fail(ErrorKind::BadParams, "--p is required");
  OracleOptions opts;
  opts.max_free_cells = o.cap;
  const MinRankResult r = min_rank_search(zero_pattern(p, cell_cap()), o.p, opts);
  emit(dump({{"predicate", to_json(p)}, {"p", o.p}, {"min_rank", r.rank}, {"free_cells", r.free_cells},
             {"assignments", r.assignments}, {"triangular_lower_bound", r.lower_bound}, {"matrix", to_json(r.matrix)}}),
       o.out);
  return 0;
}

int run_rank(const Options& o) {
  const ZqMatrix f = matrix_from_json(read_json_file(o.matrix));
  if (o.p < 2) fail(ErrorKind::BadParams, "--p is required");
  if (!o.factor) {
    emit(dump({{"rank", rank_mod_p(f, o.p)}, {"p", o.p}}), o.out);
    return 0;
  }
  const RankFactorization rf = factor_rank(f, o.p);
  if (!o.u_out.empty()) write_atomic(o.u_out, dump(to_json(rf.u)));
  if (!o.v_out.empty()) write_atomic(o.v_out, dump(to_json(rf.v)));
  emit(dump(to_json(rf)), o.out);
  return 0;
}

int run_reduce(const Options& o) {
  std::string name = o.name;
  if (name.empty()) {
    if (o.from.empty() || o.to.empty()) fail(ErrorKind::BadParams, "--name or both --from and --to are required");
    name = upper_id(o.from) + "=>" + upper_id(o.to);
  }
  ReductionArgs args;
  args.n = o.pred.n;
  args.t = o.pred.t;
  args.d = o.pred.d;
  args.q = o.q;
  if (!o.pred.file.empty()) args.predicate = predicate_from_json(read_json_file(o.pred.file));
  const Reduction r = builtin_reduction(name, args);
  const Encoding e = encoding_from_json(read_json_file(o.enc));
  Encoding lifted = apply_reduction(r, e);
  lifted.provenance = e.provenance + " via " + r.name;
  emit(dump(to_json(tabulate(lifted, cell_cap()), cell_cap())), o.out);
  return 0;
}

int run_rand(const Options& o) {
  if (!o.seed) fail(ErrorKind::BadParams, "--seed is required");
  const Eps eps = Eps::parse(o.eps.empty() ? std::string("0.125") : o.eps);
  const std::string id = upper_id(o.pred.id);
  const u64 q = require_q(o);
  auto make = [&]() {
    if (id == "EQ") return rand_encode_eq(o.pred.n, q, eps);
    if (id == "NEQ") return rand_encode_neq(o.pred.n, q, eps);
    if (id == "GT") return rand_encode_gt(o.pred.n, q, eps);
    fail(ErrorKind::BadParams, "rand supports eq, neq and gt");
  };
  const ProbabilisticEncoding pe = make();
  ErrorReport rep;
  if (o.mode == "exact")
    rep = exact_error(pe);
  else if (o.mode == "monte_carlo" || o.mode == "monte-carlo")
    rep = monte_carlo_error(pe, o.trials, *o.seed);
  else if (o.mode == "enumerate")
    rep = enumerate_error(pe);
  else
    fail(ErrorKind::BadParams, "--mode must be exact, monte_carlo or enumerate");
  json j = to_json(rep);
  j["predicate"] = to_json(pe.predicate());
  j["q"] = pe.q;
  j["eps"] = eps.str();
  j["buckets"] = pe.c;
  j["max_length"] = pe.max_length;
  j["seed"] = *o.seed;
  j["sample_length"] = sample(pe, *o.seed).length;
  emit(dump(j), o.out);
  return 0;
}

int run_table(const Options& o) {
  const auto rows = build_table(o.max_n);
  emit(render_markdown(rows, o.max_n), o.out);
  for (const TableRow& r : rows)
    if (!r.sound() || r.upper_status() == CellStatus::Mismatch || r.lower_status() == CellStatus::Mismatch) return 1;
  return 0;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::CapExceeded:
    case ErrorKind::TooLarge:
    case ErrorKind::Overflow: return 3;
    default: return 2;
  }
}

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

void add_predicate_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--predicate", o.pred.id, "eq, gt, neq, index, disj, ethr, thr, mpoly, or_eq");
  cmd->add_option("--pred-file,--table", o.pred.file, "predicate JSON file");
  cmd->add_option("--n", o.pred.n, "size parameter");
  cmd->add_option("--t", o.pred.t, "threshold (ETHR, THR)");
  cmd->add_option("--d", o.pred.d, "degree (MPOLY)");
  cmd->add_option("--q", o.q, "modulus");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner product predicate encodings: construct, verify, certify"};
  app.require_subcommand(1);
  Options o;

  auto* encode = app.add_subcommand("encode", "construct an encoding");
  add_predicate_flags(encode, o);
  encode->add_option("--k", o.k, "prime factors for DISJ");
  encode->add_option("--form", o.form, "ETHR form: auto or general")->check(CLI::IsMember({"auto", "general"}));
  encode->add_option("--out", o.out, "output file");

  auto* verify_cmd = app.add_subcommand("verify", "check an encoding on every pair");
  add_predicate_flags(verify_cmd, o);
  verify_cmd->add_option("--enc", o.enc, "encoding JSON")->required();
  verify_cmd->add_option("--out", o.out, "output file");

  auto* bound = app.add_subcommand("bound", "emit or check a lower-bound certificate");
  add_predicate_flags(bound, o);
  bound->add_option("--check", o.check, "certificate JSON to re-check");
  bound->add_option("--out", o.out, "output file");

  auto* minrank = app.add_subcommand("minrank", "exact minimum rank over a prime field");
  add_predicate_flags(minrank, o);
  minrank->add_option("--p", o.p, "prime")->required();
  minrank->add_option("--cap", o.cap, "maximum number of free cells");
  minrank->add_option("--out", o.out, "output file");

  auto* rank = app.add_subcommand("rank", "rank or rank factorization of a matrix");
  rank->add_option("--matrix", o.matrix, "matrix JSON")->required();
  rank->add_option("--p", o.p, "prime")->required();
  rank->add_flag("--factor", o.factor, "emit F = U V");
  rank->add_option("--u-out", o.u_out, "file for U");
  rank->add_option("--v-out", o.v_out, "file for V");
  rank->add_option("--out", o.out, "output file");

  auto* reduce = app.add_subcommand("reduce", "derive an encoding through a builtin reduction");
  add_predicate_flags(reduce, o);
  reduce->add_option("--from", o.from, "predicate of the given encoding");
  reduce->add_option("--to", o.to, "predicate to encode");
  reduce->add_option("--name", o.name, "builtin reduction name, e.g. ETHR1=>GT");
  reduce->add_option("--enc", o.enc, "encoding JSON of the --from predicate")->required();
  reduce->add_option("--out", o.out, "output file");

  auto* rand_cmd = app.add_subcommand("rand", "error of a probabilistic encoding");
  add_predicate_flags(rand_cmd, o);
  rand_cmd->add_option("--eps", o.eps, "target error, e.g. 0.125 or 1/8");
  rand_cmd->add_option("--mode", o.mode, "exact, monte_carlo or enumerate");
  rand_cmd->add_option("--seed", o.seed, "random seed")->required();
  rand_cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  rand_cmd->add_option("--out", o.out, "output file");

  auto* table = app.add_subcommand("table", "desk-scale bounds table in Markdown");
  table->add_option("--max-n", o.max_n, "size parameter (2..8)");
  table->add_option("--out", o.out, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("Usage", e.what());
    return 2;
  }

  try {
    if (*encode) return run_encode(o);
    if (*verify_cmd) return run_verify(o);
    if (*bound) return run_bound(o);
    if (*minrank) return run_minrank(o);
    if (*rank) return run_rank(o);
    if (*reduce) return run_reduce(o);
    if (*rand_cmd) return run_rand(o);
    if (*table) return run_table(o);
  } catch (const Error& e) {
    report_error(std::string(to_string(e.kind())), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return 2;
  }
  return 2;
}
