#include <doctest.h>

#include <random>

#include "pfw/cegis.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/parser.hpp"
#include "pfw/smt.hpp"
#include "test_util.hpp"

using namespace pfw;

namespace {

SmtConfig config() {
  SmtConfig c;
  c.solver_path = PFW_SMT_SOLVER_PATH;
  return c;
}

}  // namespace

TEST_SUITE("smt-backend") {
  TEST_CASE("contradictory bounds give a core with both labels") {
    SmtSession s(config());
    SmtResult r = s.check({{"lo", parse_formula("x >= 1")}, {"hi", parse_formula("x <= 0")}}, false, true);
    REQUIRE(r.unsat());
    CHECK(r.core == std::set<std::string>{"lo", "hi"});
  }

  TEST_CASE("a determined system gives its model") {
    SmtSession s(config());
    SmtResult r = s.check({{"", parse_formula("x + y = 3")}, {"", parse_formula("x = 1")}}, true, false);
    REQUIRE(r.sat());
    CHECK(r.model.at("x") == Value::of_int(1));
    CHECK(r.model.at("y") == Value::of_int(2));
  }

  TEST_CASE("lowering") {
    CHECK(lower(parse_formula("x1 + 1 = 2 * x2")) == "(= (+ x1 1) (* 2 x2))");
    CHECK(lower(Formula::land(Formula::bool_var("b"), Formula::lnot(Formula::bool_var("b")))) == "(and b (not b))");
    CHECK(lower(Formula::top()) == "true");
    CHECK(lower(parse_formula("x != y")) == "(not (= x y))");
    CHECK(lower(Formula::atom(Rel::Eq, Term::var("x"), Term::int_lit(-5))) == "(= x (- 5))");
  }

  TEST_CASE("primed and unusual names are quoted") {
    SmtSession s(config());
    SmtResult r = s.check({{"", parse_formula("x' = x + 1 and x = -7")}}, true, false);
    REQUIRE(r.sat());
    CHECK(r.model.at("x'") == Value::of_int(-6));
    CHECK(smt_symbol("x'") != "x'");
  }

  TEST_CASE("Booleans stay Boolean") {
    SmtSession s(config());
    SmtResult r = s.check({{"", parse_formula("b and !c", {{"b", Sort::Bool}, {"c", Sort::Bool}})}}, true, false);
    REQUIRE(r.sat());
    CHECK(r.model.at("b") == Value::of_bool(true));
    CHECK(r.model.at("c") == Value::of_bool(false));
  }

  TEST_CASE("unconstrained variables are completed with defaults and flagged") {
    SmtSession s(config());
    VarSet known{{"x", Sort::Int}, {"y", Sort::Int}};
    SmtResult r = s.check({{"", parse_formula("x = 3 or x = y + 0 - y + 3", known)}}, true, false);
    REQUIRE(r.sat());
    CHECK(r.model.at("x") == Value::of_int(3));
  }

  TEST_CASE("every model satisfies its assertions under local evaluation") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> c(-3, 3);
    SmtSession s(config());
    int sat = 0;
    for (int i = 0; i < 60; ++i) {
      std::vector<LabeledFormula> as;
      for (int j = 0; j < 3; ++j) {
        Term t = Term::add(Term::scale(c(rng), Term::var("x")), Term::scale(c(rng), Term::var("y")));
        as.emplace_back("", Formula::atom(j % 2 ? Rel::Le : Rel::Ne, t, Term::int_lit(c(rng))));
      }
      SmtResult r = s.check(as, true, false);
      if (!r.sat()) continue;
      ++sat;
      for (const auto& [l, f] : as) CHECK(eval(f, r.model));
    }
    CHECK(sat > 0);
  }

  TEST_CASE("queries survive a restart") {
    SmtSession s(config());
    CHECK(s.check({{"", parse_formula("x > 0")}}, false, false).sat());
    s.restart();
    CHECK(s.check({{"", parse_formula("x > 0 and x < 0")}}, false, false).unsat());
    CHECK(s.queries() == 2);
  }

  TEST_CASE("a missing solver binary is an error") {
    SmtConfig c;
    c.solver_path = "/nonexistent/solver";
    SmtSession s(c);
    CHECK_THROWS_AS(s.check({{"", parse_formula("x > 0")}}, false, false), SmtError);
  }

  TEST_CASE("a published solution validates through the negated clauses") {
    PfwCsp problem = parse_pfwcsp(test::slurp("benchmarks/golden/doubleSquare.pfw"));
    Candidate sol = parse_candidate(test::slurp("benchmarks/solutions/doubleSquare.sol"), &problem.kinding);
    SmtSession s(config());
    for (const auto& c : problem.clauses) {
      SmtResult r = s.check({{"", Formula::lnot(substitute_predicates(c, sol))}}, false, false);
      CHECK(r.unsat());
    }
  }
}
