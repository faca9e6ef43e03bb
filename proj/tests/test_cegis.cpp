#include <doctest.h>

#include <filesystem>

#include "pfw/cegis.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/parser.hpp"
#include "pfw/printer.hpp"
#include "test_util.hpp"

using namespace pfw;
namespace fs = std::filesystem;

namespace {

SmtConfig smt() {
  SmtConfig c;
  c.solver_path = PFW_SMT_SOLVER_PATH;
  return c;
}

SolveConfig config(double timeout_s = 60) {
  SolveConfig c;
  c.smt = smt();
  c.timeout_s = timeout_s;
  return c;
}

Candidate all_true(const Kinding& k) {
  Candidate c;
  for (const auto& [p, sig] : k) {
    PredicateDefinition d;
    for (std::size_t i = 0; i < sig.sorts.size(); ++i) d.params.emplace_back("a" + std::to_string(i), sig.sorts[i]);
    d.body = Formula::top();
    c[p] = d;
  }
  return c;
}

bool mentions(const ExampleInstance& e, const std::string& pred) {
  for (const auto* side : {&e.positive, &e.negative})
    for (const auto& a : *side)
      if (a.pred == pred) return true;
  return false;
}

}  // namespace

TEST_SUITE("cegis") {
  TEST_CASE("a goal clause is solved by the empty predicate") {
    PfwCsp p = parse_pfwcsp(":- P(0).\n");
    SolveOutcome o = solve(p, config());
    REQUIRE(o.kind == SolveOutcome::Kind::Solution);
    CHECK_FALSE(eval(o.candidate.at("P").body, {{o.candidate.at("P").params[0].first, Value::of_int(0)}}));
  }

  TEST_CASE("a fact against a goal is refuted quickly") {
    PfwCsp p = parse_pfwcsp("P(0).\n:- P(0).\n");
    SolveOutcome o = solve(p, config());
    REQUIRE(o.kind == SolveOutcome::Kind::UnsatWitness);
    CHECK(o.iterations <= 2);
    CHECK_FALSE(o.witness.empty());
  }

  TEST_CASE("two clauses grounding to one instance in a round are not a repeat") {
    PfwCsp p = parse_pfwcsp("I(0).\n:- I(x), x >= 0.\n:- I(x), x <= 0.\n");
    SolveOutcome o;
    CHECK_NOTHROW(o = solve(p, config()));
    CHECK(o.kind == SolveOutcome::Kind::UnsatWitness);
  }

  TEST_CASE("a forced well-founded two-cycle is refuted") {
    PfwCsp p = parse_pfwcsp("wf R(int, int).\nR(0, 1).\nR(1, 0).\n");
    SolveOutcome o = solve(p, config(5));
    CHECK(o.kind == SolveOutcome::Kind::UnsatWitness);
    CHECK(o.elapsed_s < 5);
  }

  TEST_CASE("published solutions validate and the trivial candidate does not") {
    SmtSession s(smt());
    for (const char* name : {"doubleSquare", "cotermIntro", "tsgni"}) {
      CAPTURE(name);
      PfwCsp p = parse_pfwcsp(test::slurp(std::string("benchmarks/golden/") + name + ".pfw"));
      Candidate sol = parse_candidate(test::slurp(std::string("benchmarks/solutions/") + name + ".sol"), &p.kinding);
      CHECK(validate(sol, p, s).valid);

      Candidate t = all_true(p.kinding);
      ValidationResult v = validate(t, p, s);
      CHECK_FALSE(v.valid);
      // every reported assignment falsifies its clause
      for (const auto& viol : v.violations) {
        Formula inst = substitute_predicates(p.clauses[viol.clause], t);
        CHECK_FALSE(eval(inst, viol.theta));
      }
    }
  }

  TEST_CASE("validation requires a definition for every predicate") {
    SmtSession s(smt());
    PfwCsp p = parse_pfwcsp("P(0).\n");
    CHECK_THROWS_AS(validate({}, p, s), MissingDefinition);
  }

  TEST_CASE("resolution derives consequences of unit facts once") {
    SmtSession s(smt());
    PfwCsp p = parse_pfwcsp("P(0).\nQ(x) :- P(x), x >= 0.\n:- Q(x), x > 5.\n");
    ExampleInstance fact;
    fact.positive.push_back({"P", {Value::of_int(0)}});
    ResolutionMemo memo;
    auto more = resolution_expand({fact}, p, s, {}, &memo);
    bool has_q = false;
    for (const auto& e : more) {
      CHECK(e.canonical() != fact.canonical());
      has_q = has_q || mentions(e, "Q");
    }
    CHECK(has_q);
    std::vector<ExampleInstance> all{fact};
    all.insert(all.end(), more.begin(), more.end());
    auto again = resolution_expand(all, p, s, {}, &memo);
    for (const auto& e : again) CHECK_FALSE(mentions(e, "P"));
  }

  TEST_CASE("every member of the trivial suite is solved and the answer validates") {
    SmtSession s(smt());
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(test::path("benchmarks/trivial"))) {
      if (entry.path().extension() != ".pfw") continue;
      ++n;
      CAPTURE(entry.path().string());
      PfwCsp p = parse_pfwcsp(test::slurp("benchmarks/trivial/" + entry.path().filename().string()));
      SolveOutcome o = solve(p, config(60));
      REQUIRE(o.kind == SolveOutcome::Kind::Solution);
      CHECK(validate(o.candidate, p, s).valid);
      CHECK(check_candidate_shape(o.candidate, p.kinding).empty());
      for (const auto& issue : check_definition_kinds(o.candidate, p.kinding, config())) FAIL_CHECK(issue.pred << ": " << issue.message);
      CHECK(o.stats.progress_checks > 0);
    }
    CHECK(n >= 5);
  }

  TEST_CASE("events are reported in order and end with done") {
    PfwCsp p = parse_pfwcsp("I(0).\nI(y) :- I(x), y = x + 1.\n:- I(x), x < 0.\n");
    SolveConfig c = config();
    std::vector<SolveEvent> events;
    c.on_event = [&](const SolveEvent& e) { events.push_back(e); };
    SolveOutcome o = solve(p, c);
    REQUIRE(o.kind == SolveOutcome::Kind::Solution);
    REQUIRE_FALSE(events.empty());
    CHECK(events.back().phase == "done");
    for (std::size_t i = 1; i < events.size(); ++i) CHECK(events[i].elapsed_s >= events[i - 1].elapsed_s);
  }

  TEST_CASE("a zero budget times out") {
    PfwCsp p = parse_pfwcsp("I(0).\nI(y) :- I(x), y = x + 1.\n:- I(x), x < 0.\n");
    SolveOutcome o = solve(p, config(0));
    CHECK(o.kind == SolveOutcome::Kind::Timeout);
  }

  TEST_CASE("parameter overrides reach the solver") {
    PfwCsp p = parse_pfwcsp("I(0).\n:- I(x), x < 0.\n");
    SolveConfig c = config();
    c.init_params = "I:nc=3";
    SolveOutcome o = solve(p, c);
    REQUIRE(o.kind == SolveOutcome::Kind::Solution);
    CHECK(o.params.at("I")["nc"] >= 3);
  }

  TEST_CASE("fingerprints identify candidates up to text") {
    Candidate a = parse_candidate("P(x) := x >= 0.\n");
    Candidate b = parse_candidate("P(y) := y >= 0.\n");
    Candidate c = parse_candidate("P(x) := x >= 1.\n");
    CHECK(fingerprint(a) != fingerprint(c));
    CHECK(fingerprint(a) == fingerprint(a));
    (void)b;
  }

  TEST_CASE("definition shape checks") {
    Kinding k{{"F", {Kind::FN, {Sort::Int, Sort::Int}}}};
    CHECK_FALSE(check_candidate_shape(parse_candidate("F(x) := x >= 0.\n"), k).empty());
    CHECK(check_candidate_shape(parse_candidate("F(x, r) := r = x.\n"), k).empty());
    CHECK_FALSE(check_definition_kinds(parse_candidate("F(x, r) := r >= x.\n"), k, config()).empty());
  }
}
