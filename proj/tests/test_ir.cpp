#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "pfw/ir_ops.hpp"
#include "pfw/parser.hpp"
#include "pfw/printer.hpp"
#include "test_util.hpp"

using namespace pfw;

namespace {

bool instance_holds(const ExampleInstance& e, const Candidate& sigma) {
  if (e.trivially_true) return true;
  auto holds = [&](const GroundAtom& a) {
    std::vector<Term> args;
    for (const auto& v : a.args) args.push_back(Term::constant(v));
    return eval(apply_definition(sigma.at(a.pred), args), Assignment{});
  };
  for (const auto& a : e.positive)
    if (holds(a)) return true;
  for (const auto& a : e.negative)
    if (!holds(a)) return true;
  return false;
}

}  // namespace

TEST_SUITE("core-ir") {
  TEST_CASE("well-sortedness flags a Bool argument at an Int position") {
    PfwCsp p = parse_pfwcsp("ord X(int).\nX(x) :- x = 0.\n");
    // build X(true) directly; the parser would reject it earlier
    Clause c;
    c.positive.push_back({"X", {Term::bool_lit(true)}});
    p.clauses.push_back(c);
    auto errs = check_well_sorted(p);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].clause_index == 1);
    CHECK(errs[0].atom.find("X") != std::string::npos);
  }

  TEST_CASE("well-sortedness accepts the doubleSquare listing and the empty set") {
    PfwCsp p = parse_pfwcsp(test::slurp("benchmarks/golden/doubleSquare.pfw"));
    CHECK(p.clauses.size() == 8);
    CHECK(check_well_sorted(p).empty());
    CHECK(check_well_sorted(PfwCsp{}).empty());
  }

  TEST_CASE("predicate substitution beta-reduces definitions") {
    PfwCsp p = parse_pfwcsp("X(x + 1) :- X(x).\n");
    Candidate s = parse_candidate("X(a) := a >= 0.\n");
    Formula f = substitute_predicates(p.clauses[0], s);
    CHECK_FALSE(f.has_pred_app());
    // valid: x >= 0 => x + 1 >= 0, checked on a window
    for (int x = -5; x <= 5; ++x) CHECK(eval(f, {{"x", Value::of_int(x)}}));
    Formula expected = parse_formula("!(x >= 0) or x + 1 >= 0");
    for (int x = -5; x <= 5; ++x) CHECK(eval(expected, {{"x", Value::of_int(x)}}) == eval(f, {{"x", Value::of_int(x)}}));
  }

  TEST_CASE("substitution leaves theory-only clauses unchanged") {
    PfwCsp p = parse_pfwcsp("x >= 0 :- x > 3.\n");
    Formula f = substitute_predicates(p.clauses[0], Candidate{});
    CHECK(f == p.clauses[0].theory_part());
  }

  TEST_CASE("substitution reports a missing definition") {
    PfwCsp p = parse_pfwcsp("X(0).\n");
    CHECK_THROWS_AS(substitute_predicates(p.clauses[0], Candidate{}), MissingDefinition);
  }

  TEST_CASE("grounding folds theory atoms") {
    PfwCsp p = parse_pfwcsp("X(x') :- X(x), x' = x + 1.\nX(x) :- !(x >= 0).\n");
    ExampleInstance a = ground(p.clauses[0], {{"x", Value::of_int(0)}, {"x'", Value::of_int(1)}});
    CHECK(a.to_string() == ExampleInstance{{{"X", {Value::of_int(1)}}}, {{"X", {Value::of_int(0)}}}}.to_string());
    ExampleInstance b = ground(p.clauses[1], {{"x", Value::of_int(5)}});
    CHECK(b.trivially_true);
    ExampleInstance c = ground(p.clauses[1], {{"x", Value::of_int(-1)}});
    CHECK_FALSE(c.trivially_true);
    REQUIRE(c.positive.size() == 1);
    CHECK(c.positive[0].args[0] == Value::of_int(-1));
    CHECK(c.negative.empty());
  }

  TEST_CASE("grounding requires a complete substitution") {
    PfwCsp p = parse_pfwcsp("X(x) :- x = y.\n");
    CHECK_THROWS_AS(ground(p.clauses[0], {{"x", Value::of_int(0)}}), IncompleteSubstitution);
  }

  TEST_CASE("integer folding is exact beyond machine width") {
    PfwCsp p = parse_pfwcsp("X(x) :- x > 9223372036854775807.\n");
    Integer big("340282366920938463463374607431768211456");
    ExampleInstance e = ground(p.clauses[0], {{"x", Value::of_int(big)}});
    REQUIRE(e.positive.size() == 1);
    CHECK(e.positive[0].args[0].as_int() == big);
    ExampleInstance f = ground(p.clauses[0], {{"x", Value::of_int(5)}});
    CHECK(f.trivially_true);
  }

  TEST_CASE("grounding commutes with predicate substitution on random clauses") {
    std::mt19937_64 rng(7);
    const char* bodies[] = {"x + y >= 1", "x = 2 * y", "x > 0 and y <= 1", "!(x = y) or x >= 2", "x - y < 0"};
    const char* defs[] = {"a >= 0", "a - b <= 1", "a = 1 or b = 0", "2 * a + b > 0", "true", "false"};
    std::uniform_int_distribution<int> pick5(0, 4), pick6(0, 5), val(-2, 2), bit(0, 1);
    for (int round = 0; round < 200; ++round) {
      std::ostringstream src;
      // one head atom or theory head, two body atoms and a theory body
      if (bit(rng)) src << "P(x, y)";
      else src << "x >= " << val(rng);
      src << " :- Q(y, x), P(x + 1, y), " << bodies[pick5(rng)] << ".\n";
      PfwCsp p = parse_pfwcsp(src.str());
      Candidate s = parse_candidate(std::string("P(a, b) := ") + defs[pick6(rng)] + ".\nQ(a, b) := " + defs[pick6(rng)] + ".\n");
      Assignment theta{{"x", Value::of_int(val(rng))}, {"y", Value::of_int(val(rng))}};
      const Clause& c = p.clauses[0];
      bool direct = eval(substitute_predicates(c, s), theta);
      CHECK(direct == instance_holds(ground(c, theta), s));
      CHECK_FALSE(substitute_predicates(c, s).has_pred_app());
    }
  }

  TEST_CASE("canonical instances deduplicate and detect complementary literals") {
    GroundAtom a{"P", {Value::of_int(0)}}, b{"Q", {Value::of_bool(true)}};
    ExampleInstance e{{b, a, a}, {}};
    ExampleInstance c = e.canonical();
    CHECK(c.positive.size() == 2);
    ExampleInstance t{{a}, {a}};
    CHECK(t.canonical().trivially_true);
  }
}
