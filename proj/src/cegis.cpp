#include "pfw/cegis.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>

#include "pfw/example_unsat.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/printer.hpp"

namespace pfw {

std::string_view to_string(SolveOutcome::Kind kind) {
  switch (kind) {
    case SolveOutcome::Kind::Solution: return "solved";
    case SolveOutcome::Kind::UnsatWitness: return "unsat";
    case SolveOutcome::Kind::Timeout: return "timeout";
  }
  return "?";
}

std::string fingerprint(const Candidate& sigma) { return print_candidate(sigma); }

namespace {

Value default_value(Sort s) { return s == Sort::Int ? Value::of_int(0) : Value::of_bool(false); }

Assignment complete(const Assignment& model, const VarSet& vars) {
  Assignment theta;
  for (const auto& [n, s] : vars) {
    auto it = model.find(n);
    theta[n] = it != model.end() && it->second.sort() == s ? it->second : default_value(s);
  }
  return theta;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation

constexpr int kSmallCex = 4;

ValidationResult validate(const Candidate& sigma, const PfwCsp& problem, SmtSession& session,
                          std::optional<int> timeout_ms) {
  ValidationResult result;
  for (std::size_t i = 0; i < problem.clauses.size(); ++i) {
    const Clause& c = problem.clauses[i];
    Formula f = substitute_predicates(c, sigma);
    VarSet fv = c.free_vars();
    // small counterexamples first; they keep synthesis queries cheap
    SmtResult r;
    for (int bound : {kSmallCex, 0}) {
      std::vector<LabeledFormula> q{{"", Formula::lnot(f)}};
      if (bound > 0)
        for (const auto& [x, sort] : fv)
          if (sort == Sort::Int) {
            q.emplace_back("", Formula::atom(Rel::Le, Term::var(x), Term::int_lit(bound)));
            q.emplace_back("", Formula::atom(Rel::Ge, Term::var(x), Term::int_lit(-bound)));
          }
      r = session.check(q, true, false, timeout_ms);
      if (!r.unsat()) break;
    }
    if (r.unknown()) throw SmtError("validation of clause " + std::to_string(i) + " undecided (" + r.reason + ")");
    if (r.unsat()) continue;
    result.valid = false;
    Violation v;
    v.clause = i;
    v.theta = complete(r.model, fv);
    v.instance = ground(c, v.theta);
    result.violations.push_back(std::move(v));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Resolution phase

std::vector<ExampleInstance> resolution_expand(const std::vector<ExampleInstance>& examples, const PfwCsp& problem,
                                               SmtSession& session, const ResolutionConfig& config,
                                               ResolutionMemo* memo) {
  std::set<ExampleInstance> known(examples.begin(), examples.end());
  std::vector<ExampleInstance> out;
  auto add = [&](const ExampleInstance& e) {
    ExampleInstance c = e.canonical();
    if (c.trivially_true || out.size() >= config.max_new) return;
    if (known.insert(c).second) out.push_back(c);
  };

  // unit propagation to a fixpoint
  std::map<GroundAtom, bool> units;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& ex : examples) {
      if (ex.trivially_true) continue;
      bool sat = false;
      std::size_t open = 0;
      const GroundAtom* last = nullptr;
      bool last_pos = false;
      auto visit = [&](const GroundAtom& a, bool pos) {
        auto it = units.find(a);
        if (it == units.end()) {
          ++open;
          last = &a;
          last_pos = pos;
        } else if (it->second == pos) {
          sat = true;
        }
      };
      for (const auto& a : ex.positive) visit(a, true);
      for (const auto& a : ex.negative) visit(a, false);
      if (!sat && open == 1) {
        units[*last] = last_pos;
        changed = true;
      }
    }
  }
  for (const auto& [a, v] : units) {
    ExampleInstance e;
    (v ? e.positive : e.negative).push_back(a);
    add(e);
  }

  // resolve input clauses against the unit facts
  std::size_t queries = 0;
  for (const auto& [unit, value] : units) {
    for (std::size_t ci = 0; ci < problem.clauses.size(); ++ci) {
      const Clause& c = problem.clauses[ci];
      // a positive unit resolves with a negative occurrence and vice versa
      const auto& side = value ? c.negative : c.positive;
      for (std::size_t j = 0; j < side.size(); ++j) {
        if (out.size() >= config.max_new || queries >= config.max_queries) return out;
        const PredAtom& atom = side[j];
        if (atom.pred != unit.pred || atom.args.size() != unit.args.size()) continue;
        std::size_t pos = value ? c.positive.size() + j : j;
        if (memo && !memo->emplace(ci, pos, (value ? "+" : "-") + unit.to_string()).second) continue;
        std::vector<Formula> q{Formula::lnot(c.theory_part())};
        for (std::size_t k = 0; k < atom.args.size(); ++k)
          q.push_back(Formula::atom(Rel::Eq, atom.args[k], Term::constant(unit.args[k])));
        ++queries;
        SmtResult r = session.check({{"", Formula::land(q)}}, true, false);
        if (!r.sat()) continue;
        ExampleInstance inst = ground(c, complete(r.model, c.free_vars()));
        if (inst.trivially_true) continue;
        add(inst);
        ExampleInstance resolvent;
        bool subsumed = false;
        for (const auto& a : inst.positive) {
          auto it = units.find(a);
          if (it == units.end()) resolvent.positive.push_back(a);
          else subsumed = subsumed || it->second;
        }
        for (const auto& a : inst.negative) {
          auto it = units.find(a);
          if (it == units.end()) resolvent.negative.push_back(a);
          else subsumed = subsumed || !it->second;
        }
        if (!subsumed) add(resolvent);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Main loop

SolveOutcome solve(const PfwCsp& problem, const SolveConfig& config) {
  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::milliseconds(static_cast<long long>(config.timeout_s * 1000));
  auto remaining_ms = [&]() {
    return static_cast<int>(std::max<long long>(
        1, std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count()));
  };

  SolveOutcome out;
  out.params = initial_params(problem.kinding);
  if (!config.init_params.empty()) apply_param_overrides(out.params, config.init_params);

  SmtSession session(config.smt);
  std::vector<ExampleInstance> examples;
  std::set<ExampleInstance> example_set;
  std::set<std::string> fingerprints;
  ResolutionMemo memo;

  auto emit = [&](const std::string& phase, const std::string& detail = "") {
    if (!config.on_event) return;
    config.on_event({out.iterations, phase, seconds_since(t0), examples.size(), params_to_string(out.params), detail});
  };
  auto finish = [&](SolveOutcome::Kind kind) {
    out.kind = kind;
    out.elapsed_s = seconds_since(t0);
    out.stats.smt_queries = session.queries();
    emit("done", std::string(to_string(kind)));
    return out;
  };
  auto add_example = [&](const ExampleInstance& e) {
    ExampleInstance c = e.canonical();
    if (example_set.insert(c).second) {
      examples.push_back(c);
      return true;
    }
    return false;
  };
  auto unsat_now = [&]() {
    emit("unsat-check");
    return check_examples_unsat(examples, problem.kinding).unsat;
  };

  try {
    for (;;) {
      ++out.iterations;
      if (Clock::now() >= deadline) return finish(SolveOutcome::Kind::Timeout);

      // synthesis, growing the strata until the examples are satisfiable
      Candidate candidate;
      for (;;) {
        if (Clock::now() >= deadline) return finish(SolveOutcome::Kind::Timeout);
        int budget = std::min(config.synthesis_timeout_ms, remaining_ms());
        emit("synthesis");
        SynthesisResult r = synthesize(examples, problem.kinding, out.params, session, config.templates, budget);
        if (r.status == SynthesisResult::Status::Found) {
          candidate = std::move(r.candidate);
          break;
        }
        if (r.status == SynthesisResult::Status::Unknown) ++out.stats.synthesis_unknowns;
        std::set<std::string> implicated = r.implicated;
        if (implicated.empty())
          for (const auto& [p, sig] : problem.kinding) implicated.insert(p);
        out.params = update_params(out.params, implicated);
        emit("grow", r.status == SynthesisResult::Status::Unknown ? "unknown" : "no candidate");
      }

      std::string fp = fingerprint(candidate);
      ++out.stats.progress_checks;
      if (!fingerprints.insert(fp).second) throw ProgressViolation("candidate repeated at iteration " + std::to_string(out.iterations));

      emit("validation");
      int vbudget = std::min(config.validation_timeout_ms, remaining_ms());
      ValidationResult v;
      try {
        v = validate(candidate, problem, session, vbudget);
      } catch (const SmtError&) {
        if (Clock::now() >= deadline) return finish(SolveOutcome::Kind::Timeout);
        throw;
      }
      if (v.valid) {
        out.candidate = std::move(candidate);
        return finish(SolveOutcome::Kind::Solution);
      }
      // two clauses may ground to the same instance in one round; only a
      // repeat of an earlier round's example means the loop is stuck
      std::set<std::string> this_round;
      for (const auto& viol : v.violations) {
        ++out.stats.progress_checks;
        if (viol.instance.trivially_true)
          throw ProgressViolation("counterexample for clause " + std::to_string(viol.clause) + " is trivially true");
        std::string key = viol.instance.canonical().to_string();
        if (!add_example(viol.instance)) {
          if (this_round.count(key)) continue;
          throw ProgressViolation("counterexample repeated: " + viol.instance.to_string());
        }
        this_round.insert(key);
        ++out.stats.counterexamples;
      }
      emit("validation", std::to_string(v.violations.size()) + " violated");

      if (config.resolution) {
        auto extra = resolution_expand(examples, problem, session, config.resolution_limits, &memo);
        for (const auto& e : extra)
          if (add_example(e)) ++out.stats.resolution_instances;
        emit("resolution", std::to_string(extra.size()) + " new");
      }

      if (unsat_now()) {
        out.witness = examples;
        return finish(SolveOutcome::Kind::UnsatWitness);
      }
    }
  } catch (const SmtError&) {
    if (Clock::now() >= deadline) return finish(SolveOutcome::Kind::Timeout);
    throw;
  }
}

// ---------------------------------------------------------------------------
// Kind checks for user definitions

std::vector<DefinitionIssue> check_candidate_shape(const Candidate& sigma, const Kinding& kinding) {
  std::vector<DefinitionIssue> issues;
  for (const auto& [pred, sig] : kinding) {
    if (auto msg = check_signature(pred, sig)) issues.push_back({pred, *msg});
    auto it = sigma.find(pred);
    if (it == sigma.end()) {
      issues.push_back({pred, "no definition"});
      continue;
    }
    const auto& params = it->second.params;
    if (params.size() != sig.sorts.size()) {
      issues.push_back({pred, "definition has " + std::to_string(params.size()) + " parameters, expected " +
                                  std::to_string(sig.sorts.size())});
      continue;
    }
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].second != sig.sorts[i])
        issues.push_back({pred, "parameter " + params[i].first + " has sort " + std::string(to_string(params[i].second))});
    VarSet fv = free_vars(it->second.body);
    for (const auto& [n, s] : fv)
      if (std::none_of(params.begin(), params.end(), [&](const auto& p) { return p.first == n; }))
        issues.push_back({pred, "body mentions " + n + ", which is not a parameter"});
  }
  return issues;
}

std::vector<DefinitionIssue> check_definition_kinds(const Candidate& sigma, const Kinding& kinding,
                                                    const SolveConfig& config, bool wf) {
  std::vector<DefinitionIssue> issues;
  SmtSession session(config.smt);
  for (const auto& [pred, sig] : kinding) {
    auto it = sigma.find(pred);
    if (it == sigma.end() || sig.kind == Kind::Ord) continue;
    const PredicateDefinition& def = it->second;
    if (sig.kind == Kind::FN) {
      const auto& [r, rs] = def.params.back();
      TermSubst s1{{r, Term::var(r + "!1", rs)}}, s2{{r, Term::var(r + "!2", rs)}};
      SmtResult fun = session.check({{"", substitute(def.body, s1)},
                                     {"", substitute(def.body, s2)},
                                     {"", Formula::atom(Rel::Ne, Term::var(r + "!1", rs), Term::var(r + "!2", rs))}},
                                    false, false, config.validation_timeout_ms);
      if (fun.sat()) issues.push_back({pred, "not functional: two outputs for one input"});
      else if (fun.unknown()) issues.push_back({pred, "functionality undecided (" + fun.reason + ")"});
      VarSet inputs;
      for (std::size_t i = 0; i + 1 < def.params.size(); ++i) inputs[def.params[i].first] = def.params[i].second;
      std::string q = "(forall ((" + smt_symbol(r) + (rs == Sort::Int ? " Int" : " Bool") + ")) (not " + lower(def.body) + "))";
      SmtResult tot = session.check_script(inputs, {q}, config.validation_timeout_ms);
      if (tot.sat()) issues.push_back({pred, "not total: some input has no output"});
      else if (tot.unknown()) issues.push_back({pred, "totality undecided (" + tot.reason + ")"});
    } else if (wf) {
      // R is contained in a template relation W of kind WF
      std::string w = "WF_kind_check";
      PfwCsp mini;
      mini.kinding[w] = sig;
      Clause c;
      std::vector<Term> args;
      for (const auto& [n, s] : def.params) args.push_back(Term::var(n, s));
      c.positive.push_back({w, args});
      c.body_theory.push_back(def.body);
      mini.clauses.push_back(c);
      SolveConfig sub = config;
      sub.on_event = nullptr;
      SolveOutcome o = solve(mini, sub);
      if (o.kind != SolveOutcome::Kind::Solution)
        issues.push_back({pred, std::string("no well-founded template relation contains it (") +
                                    std::string(to_string(o.kind)) + ")"});
    }
  }
  return issues;
}

}  // namespace pfw
