#include <doctest.h>

#include <filesystem>

#include "pfw/canon.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/parser.hpp"
#include "pfw/printer.hpp"
#include "test_util.hpp"

using namespace pfw;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const char* dir : {"benchmarks/corpus", "benchmarks/golden", "benchmarks/trivial"})
    for (const auto& e : fs::directory_iterator(test::path(dir)))
      if (e.path().extension() == ".pfw") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string read_abs(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("parser") {
  TEST_CASE("a top head makes the conclusion true") {
    PfwCsp p = parse_pfwcsp("top :- Inv(d, b, x1, x2), x1 <= 0, x2 <= 0.\n");
    REQUIRE(p.clauses.size() == 1);
    const Clause& c = p.clauses[0];
    CHECK(c.positive.empty());
    REQUIRE(c.negative.size() == 1);
    CHECK(c.negative[0].pred == "Inv");
    CHECK(c.body_theory.size() == 2);
    CHECK(simplify(Formula::lor(c.head_theory)).is_true());
  }

  TEST_CASE("a theory head is kept apart from the body") {
    PfwCsp p = parse_pfwcsp("y1 = y2 :- Inv(x1, y1, x2, y2), z1 <= 0, z2 <= 0.\n");
    const Clause& c = p.clauses[0];
    REQUIRE(c.head_theory.size() == 1);
    CHECK(to_text(c.head_theory[0]) == "y1 = y2");
    CHECK(c.positive.empty());
    CHECK(c.negative.size() == 1);
  }

  TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(parse_pfwcsp(""), ParseError);
    try {
      parse_pfwcsp("  (* nothing *) ");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      REQUIRE_FALSE(e.diagnostics().empty());
      CHECK(e.diagnostics()[0].message.find("clause") != std::string::npos);
    }
  }

  TEST_CASE("diagnostics carry positions") {
    try {
      parse_pfwcsp("P(0).\nP(x) :- x >= .\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      REQUIRE_FALSE(e.diagnostics().empty());
      CHECK(e.diagnostics()[0].span.line == 2);
    }
  }

  TEST_CASE("name prefixes give default kinds and declarations must agree") {
    PfwCsp p = parse_pfwcsp("WF_R(x, y) :- x > y, y >= 0.\nFN_F(x, r) :- r = x.\nI(x) :- x = 0.\n");
    CHECK(p.kinding.at("WF_R").kind == Kind::WF);
    CHECK(p.kinding.at("FN_F").kind == Kind::FN);
    CHECK(p.kinding.at("I").kind == Kind::Ord);
    CHECK_THROWS_AS(parse_pfwcsp("ord WF_R(int, int).\nWF_R(x, y) :- x > y.\n"), ParseError);
  }

  TEST_CASE("sort annotations must be consistent per position") {
    CHECK_THROWS_AS(parse_pfwcsp("P(b : bool).\nP(x) :- x = 0.\n"), ParseError);
    PfwCsp p = parse_pfwcsp("P(b : bool) :- b.\n:- P(b : bool), !b.\n");
    CHECK(p.kinding.at("P").sorts == std::vector<Sort>{Sort::Bool});
  }

  TEST_CASE("nested comments") {
    PfwCsp p = parse_pfwcsp("(* outer (* inner *) still outer *)\nP(0).\n");
    CHECK(p.clauses.size() == 1);
  }

  TEST_CASE("single fact round-trips") {
    PfwCsp p = parse_pfwcsp("P(0).\n");
    PfwCsp q = parse_pfwcsp(print_pfwcsp(p));
    CHECK(compare_structurally(p, q).equal);
    CHECK(print_pfwcsp(q) == print_pfwcsp(p));
  }

  TEST_CASE("declarations of all three kinds survive printing") {
    PfwCsp p = parse_pfwcsp("ord I(int).\nwf R(int, int).\nfn F(int, bool).\nI(x) :- R(x, y), F(y, b : bool), b.\n");
    std::string text = print_pfwcsp(p);
    CHECK(text.find("ord I(int).") != std::string::npos);
    CHECK(text.find("wf R(int, int).") != std::string::npos);
    CHECK(text.find("fn F(int, bool).") != std::string::npos);
    PfwCsp q = parse_pfwcsp(text);
    CHECK(q.kinding == p.kinding);
  }

  TEST_CASE("every corpus file parses, is well-sorted and prints to a fixpoint") {
    auto files = corpus_files();
    CHECK(files.size() >= 30);
    for (const auto& f : files) {
      CAPTURE(f);
      PfwCsp p = parse_pfwcsp(read_abs(f));
      CHECK(check_well_sorted(p).empty());
      std::string once = print_pfwcsp(p);
      PfwCsp q = parse_pfwcsp(once);
      CHECK(print_pfwcsp(q) == once);
      CHECK(compare_structurally(p, q).equal);
    }
  }

  TEST_CASE("the doubleSquare listing survives print and parse") {
    PfwCsp p = parse_pfwcsp(test::slurp("benchmarks/golden/doubleSquare.pfw"));
    PfwCsp q = parse_pfwcsp(print_pfwcsp(p));
    CHECK(q.clauses.size() == 8);
    CHECK(compare_structurally(p, q).equal);
  }

  TEST_CASE("transition systems") {
    TransitionSystem ts = parse_transition_system(
        "vars x, y.\ntrans x > 0 and x' = x - y and y' = y or x <= 0 and x' = x and y' = y.\nfinal x <= 0.\n");
    CHECK(ts.vars.size() == 2);
    CHECK(eval(ts.final, {{"x", Value::of_int(0)}}));
    CHECK_FALSE(eval(ts.final, {{"x", Value::of_int(1)}}));
    CHECK(eval(ts.trans, {{"x", Value::of_int(3)}, {"y", Value::of_int(1)}, {"x'", Value::of_int(2)}, {"y'", Value::of_int(1)}}));

    CHECK_THROWS_AS(parse_transition_system("vars x.\ntrans x' = x.\n"), ParseError);
    CHECK_THROWS_AS(parse_transition_system("vars x.\ntrans x' = z.\nfinal x <= 0.\n"), ParseError);

    TransitionSystem ch = parse_transition_system(
        "vars x.\nchoice r.\nchoice_trans x' = x.\ntrans true.\nfinal x <= 0.\n");
    CHECK(ch.choice_vars.size() == 1);
    CHECK(ch.choice_trans.has_value());
  }

  TEST_CASE("every shipped transition system parses") {
    for (const auto& e : fs::directory_iterator(test::path("benchmarks/systems"))) {
      CAPTURE(e.path().string());
      CHECK_NOTHROW(parse_transition_system(read_abs(e.path().string())));
    }
  }

  TEST_CASE("candidates take sorts from annotations or the kinding") {
    Candidate c = parse_candidate("P(a, b : bool) := b and a >= 0.\n");
    REQUIRE(c.at("P").params.size() == 2);
    CHECK(c.at("P").params[1].second == Sort::Bool);
    Kinding k{{"Q", {Kind::Ord, {Sort::Int, Sort::Bool}}}};
    Candidate d = parse_candidate("Q(a, b) := b.\n", &k);
    CHECK(d.at("Q").params[1].second == Sort::Bool);
  }
}
