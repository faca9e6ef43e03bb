// pfw: solve, encode, validate, lint and bench pfwCSP problems.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "pfw/bench.hpp"
#include "pfw/canon.hpp"
#include "pfw/cegis.hpp"
#include "pfw/encoder.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/parser.hpp"
#include "pfw/printer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pfw;

namespace {

constexpr int kSolved = 0, kError = 1, kInvalid = 2, kMismatch = 3, kUnsat = 10, kTimeout = 20;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string text_arg(const std::string& s) { return !s.empty() && s[0] == '@' ? slurp(s.substr(1)) : s; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_parse_error(const std::string& file, const ParseError& e) {
  for (const auto& d : e.diagnostics()) std::cerr << file << ":" << d.to_string() << "\n";
}

// -- solve -------------------------------------------------------------------

struct SolveArgs {
  std::string file, smt, init_params, log;
  double timeout = 0;
  int query_timeout = 0;
  bool no_resolution = false, json = false;
};

int cmd_solve(const SolveArgs& a) {
  PfwCsp problem;
  try {
    problem = parse_pfwcsp(slurp(a.file));
  } catch (const ParseError& e) {
    print_parse_error(a.file, e);
    return kError;
  }
  SolveConfig base;
  if (!a.smt.empty()) base.smt.solver_path = a.smt;
  RunOverrides cli;
  if (a.timeout > 0) cli.timeout_s = a.timeout;
  if (!a.init_params.empty()) cli.init_params = a.init_params;
  if (a.no_resolution) cli.resolution = false;
  if (a.query_timeout > 0) cli.query_timeout_ms = a.query_timeout;
  SolveConfig config = resolve_config(base, read_sidecar(a.file), cli);

  std::ofstream log;
  if (!a.log.empty()) {
    log.open(a.log);
    if (!log) throw Error("cannot write " + a.log);
    config.on_event = [&](const SolveEvent& e) {
      log << std::fixed << std::setprecision(3) << e.elapsed_s << " it=" << e.iteration << " " << e.phase
          << " examples=" << e.examples << " params={" << e.params << "}";
      if (!e.detail.empty()) log << " " << e.detail;
      log << "\n";
      log.flush();
    };
  }

  SolveOutcome o = solve(problem, config);
  if (a.json) {
    BenchRow row;
    row.name = fs::path(a.file).stem().string();
    row.file = a.file;
    row.outcome = std::string(to_string(o.kind));
    row.elapsed_s = o.elapsed_s;
    row.iterations = o.iterations;
    row.params = params_to_string(o.params);
    if (o.kind == SolveOutcome::Kind::Solution) row.solution = print_candidate(o.candidate);
    json j = to_json(row);
    j["stats"] = {{"smt_queries", o.stats.smt_queries},
                  {"counterexamples", o.stats.counterexamples},
                  {"resolution_instances", o.stats.resolution_instances},
                  {"progress_checks", o.stats.progress_checks}};
    if (o.kind == SolveOutcome::Kind::UnsatWitness) {
      json w = json::array();
      for (const auto& e : o.witness) w.push_back(e.to_string());
      j["witness"] = w;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_string(o.kind) << " in " << std::fixed << std::setprecision(3) << o.elapsed_s << " s, "
              << o.iterations << " iterations\n";
    std::cout << "params: " << params_to_string(o.params) << "\n";
    if (o.kind == SolveOutcome::Kind::Solution) std::cout << print_candidate(o.candidate);
    if (o.kind == SolveOutcome::Kind::UnsatWitness) {
      std::cout << "unsatisfiable ground instances:\n";
      for (const auto& e : o.witness) std::cout << "  " << e.to_string() << "\n";
    }
  }
  switch (o.kind) {
    case SolveOutcome::Kind::Solution: return kSolved;
    case SolveOutcome::Kind::UnsatWitness: return kUnsat;
    case SolveOutcome::Kind::Timeout: return kTimeout;
  }
  return kError;
}

// -- encode ------------------------------------------------------------------

struct EncodeArgs {
  std::string kind, pre, post, out = "-", golden, prophecy, bound_args, smt;
  std::vector<std::string> systems, hints;
  bool symmetric = false, strict = false, prophecy_final = false, no_lint = false;
};

std::vector<TransitionSystem> load_systems(const std::vector<std::string>& files) {
  std::vector<TransitionSystem> out;
  for (const auto& f : files) {
    try {
      out.push_back(parse_transition_system(slurp(f)));
    } catch (const ParseError& e) {
      print_parse_error(f, e);
      throw Error("cannot parse " + f);
    }
  }
  return out;
}

bool report_lint(const RelationalProblem& rp, const std::string& smt, bool strict) {
  SmtConfig sc;
  if (!smt.empty()) sc.solver_path = smt;
  SmtSession session(sc);
  auto issues = lint(rp, session);
  for (const auto& i : issues)
    std::cerr << (strict ? "error" : "warning") << ": system " << i.system << ": " << i.check << ": " << i.message << "\n";
  return issues.empty();
}

int cmd_encode(const EncodeArgs& a) {
  auto kind = parse_relational_kind(a.kind);
  if (!kind) throw Error("unknown property kind " + a.kind);
  RelationalProblem rp;
  rp.kind = *kind;
  rp.systems = load_systems(a.systems);
  if (rp.systems.size() == 1 && *kind == RelationalKind::KSafety) {
    // one file stands for two copies of the same program
    rp.systems.push_back(rp.systems.front());
  }
  EncoderOptions opt;
  opt.symmetric = a.symmetric;
  opt.prophecy_final_everywhere = a.prophecy_final;
  if (!a.prophecy.empty()) opt.prophecy = split_list(a.prophecy);
  if (!a.bound_args.empty()) opt.bound_args = split_list(a.bound_args);

  rp.pre = Formula::top();
  if (!a.post.empty()) rp.post = Formula::top();
  VarSet voc = encoding_vocabulary(rp, opt);
  try {
    rp.pre = parse_formula(text_arg(a.pre), voc, &rp.user_preds);
    if (!a.post.empty()) rp.post = parse_formula(text_arg(a.post), voc, &rp.user_preds);
  } catch (const ParseError& e) {
    print_parse_error("pre/post", e);
    return kError;
  }

  if (!a.no_lint && !report_lint(rp, a.smt, a.strict) && a.strict) return kError;

  Encoding enc = encode(rp, opt);
  for (const auto& h : a.hints) {
    try {
      PfwCsp hp = parse_pfwcsp(slurp(h));
      enc.problem = add_hints(enc.problem, hp.clauses);
    } catch (const ParseError& e) {
      print_parse_error(h, e);
      return kError;
    }
  }
  std::string text = print_pfwcsp(enc.problem);
  if (a.out == "-") {
    std::cout << text;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw Error("cannot write " + a.out);
    out << text;
  }
  std::cerr << "encoded " << enc.problem.clauses.size() << " clauses\n";

  if (!a.golden.empty()) {
    PfwCsp ref;
    try {
      ref = parse_pfwcsp(slurp(a.golden));
    } catch (const ParseError& e) {
      print_parse_error(a.golden, e);
      return kError;
    }
    StructuralMatch m = compare_structurally(enc.problem, ref);
    if (!m.equal) {
      std::cerr << "golden mismatch (" << enc.problem.clauses.size() << " vs " << ref.clauses.size()
                << " clauses): " << m.message << "\n";
      return kMismatch;
    }
    std::cerr << "matches " << a.golden << "\n";
  }
  return kSolved;
}

// -- validate ----------------------------------------------------------------

struct ValidateArgs {
  std::string problem, solution, smt;
  int query_timeout = 20000;
  bool check_wf = false;
};

int cmd_validate(const ValidateArgs& a) {
  PfwCsp problem;
  Candidate sigma;
  try {
    problem = parse_pfwcsp(slurp(a.problem));
  } catch (const ParseError& e) {
    print_parse_error(a.problem, e);
    return kError;
  }
  try {
    sigma = parse_candidate(slurp(a.solution), &problem.kinding);
  } catch (const ParseError& e) {
    print_parse_error(a.solution, e);
    return kError;
  }
  SolveConfig config;
  if (!a.smt.empty()) config.smt.solver_path = a.smt;
  config.validation_timeout_ms = a.query_timeout;

  bool ok = true;
  auto shape = check_candidate_shape(sigma, problem.kinding);
  for (const auto& i : shape) {
    std::cout << "shape: " << i.pred << ": " << i.message << "\n";
    ok = false;
  }
  if (!shape.empty()) return kInvalid;

  for (const auto& i : check_definition_kinds(sigma, problem.kinding, config, a.check_wf)) {
    std::cout << "kind: " << i.pred << ": " << i.message << "\n";
    ok = false;
  }
  SmtSession session(config.smt);
  ValidationResult v = validate(sigma, problem, session, a.query_timeout);
  for (const auto& viol : v.violations) {
    ok = false;
    std::cout << "clause " << viol.clause + 1 << " violated: " << to_text(problem.clauses[viol.clause]) << "\n";
    std::cout << "  counterexample:";
    for (const auto& [n, val] : viol.theta) std::cout << " " << n << "=" << val.to_string();
    std::cout << "\n";
  }
  std::cout << (ok ? "valid" : "invalid") << ": " << problem.clauses.size() << " clauses checked\n";
  return ok ? kSolved : kInvalid;
}

// -- lint --------------------------------------------------------------------

int cmd_lint(const std::vector<std::string>& systems, const std::string& smt, bool strict) {
  RelationalProblem rp;
  rp.systems = load_systems(systems);
  bool clean = report_lint(rp, smt, strict);
  if (clean) std::cout << "no issues\n";
  return clean || !strict ? kSolved : kError;
}

// -- bench -------------------------------------------------------------------

struct BenchArgs {
  std::string dir, ref, smt, init_params, out;
  int jobs = 1, query_timeout = 0;
  double timeout = 0;
  bool json = false, no_hints = false, no_resolution = false;
};

int cmd_bench(const BenchArgs& a) {
  BenchConfig c;
  if (!a.smt.empty()) c.base.smt.solver_path = a.smt;
  if (a.timeout > 0) c.cli.timeout_s = a.timeout;
  if (!a.init_params.empty()) c.cli.init_params = a.init_params;
  if (a.no_resolution) c.cli.resolution = false;
  if (a.query_timeout > 0) c.cli.query_timeout_ms = a.query_timeout;
  c.jobs = a.jobs;
  c.prefer_hints = !a.no_hints;
  if (!a.ref.empty()) c.reference = a.ref;
  BenchReport rep = run_bench(a.dir, c);
  std::string text = a.json ? to_json(rep).dump(2) + "\n" : render_table(rep);
  std::cout << text;
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    out << (a.json ? text : to_json(rep).dump(2) + "\n");
  }
  return kSolved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfw: pfwCSP solver and relational verification encoders"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve a .pfw problem");
  solve->add_option("file", sa.file, "problem file")->required();
  solve->add_option("--timeout", sa.timeout, "wall-clock budget in seconds (default 600)");
  solve->add_option("--smt", sa.smt, "SMT solver executable (default $PFW_SMT_SOLVER or z3)");
  solve->add_option("--init-params", sa.init_params, "initial template parameters, e.g. 'ord:nd=2;WF_R:rd=2'");
  solve->add_option("--query-timeout", sa.query_timeout, "per-query timeout in ms");
  solve->add_flag("--no-resolution", sa.no_resolution, "disable the resolution phase");
  solve->add_flag("--json", sa.json, "print a JSON report");
  solve->add_option("--log", sa.log, "write per-phase events to this file");

  EncodeArgs ea;
  auto* enc = app.add_subcommand("encode", "encode a relational verification problem");
  enc->add_option("kind", ea.kind, "ksafety | coterm | tigni | tsgni")->required();
  enc->add_option("--system", ea.systems, "transition system file (repeat per copy)")->required();
  enc->add_option("--pre", ea.pre, "pre-relation, or @file")->required();
  enc->add_option("--post", ea.post, "post-relation, or @file");
  enc->add_flag("--symmetric", ea.symmetric, "co-termination in both directions");
  enc->add_flag("--strict", ea.strict, "lint findings are errors");
  enc->add_flag("--no-lint", ea.no_lint, "skip the SMT side-condition checks");
  enc->add_option("--prophecy", ea.prophecy, "comma-separated system-1 variables with prophecy copies");
  enc->add_flag("--prophecy-final", ea.prophecy_final, "check prophecies in every final-state test");
  enc->add_option("--bound-args", ea.bound_args, "comma-separated variables passed to the bound function");
  enc->add_option("--hint", ea.hints, "extra clauses to append (.pfw)");
  enc->add_option("-o,--output", ea.out, "output file, '-' for stdout");
  enc->add_option("--golden", ea.golden, "reference listing to compare against");
  enc->add_option("--smt", ea.smt, "SMT solver executable for lint");

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "check a candidate solution");
  val->add_option("problem", va.problem, "problem file")->required();
  val->add_option("solution", va.solution, "definitions file")->required();
  val->add_option("--smt", va.smt, "SMT solver executable");
  val->add_option("--query-timeout", va.query_timeout, "per-query timeout in ms");
  val->add_flag("--check-wf", va.check_wf, "also search a well-founded template relation containing each WF entry");

  std::vector<std::string> lint_systems;
  std::string lint_smt;
  bool lint_strict = false;
  auto* lnt = app.add_subcommand("lint", "side-condition checks on transition systems");
  lnt->add_option("systems", lint_systems, "transition system files")->required();
  lnt->add_option("--smt", lint_smt, "SMT solver executable");
  lnt->add_flag("--strict", lint_strict, "exit nonzero on findings");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "run every problem in a directory");
  bench->add_option("dir", ba.dir, "benchmark directory")->required();
  bench->add_option("--jobs", ba.jobs, "parallel workers");
  bench->add_option("--timeout", ba.timeout, "per-benchmark budget in seconds");
  bench->add_option("--ref", ba.ref, "reference numbers (JSON)");
  bench->add_option("--smt", ba.smt, "SMT solver executable");
  bench->add_option("--init-params", ba.init_params, "initial template parameters for every benchmark");
  bench->add_option("--query-timeout", ba.query_timeout, "per-query timeout in ms");
  bench->add_option("--out", ba.out, "also write the JSON report here");
  bench->add_flag("--json", ba.json, "print JSON instead of a table");
  bench->add_flag("--no-hints", ba.no_hints, "run unhinted variants");
  bench->add_flag("--no-resolution", ba.no_resolution, "disable the resolution phase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kError;
  }

  try {
    if (*solve) return cmd_solve(sa);
    if (*enc) return cmd_encode(ea);
    if (*val) return cmd_validate(va);
    if (*lnt) return cmd_lint(lint_systems, lint_smt, lint_strict);
    if (*bench) return cmd_bench(ba);
  } catch (const MissingDefinition& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
