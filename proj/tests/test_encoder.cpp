#include <doctest.h>

#include "pfw/canon.hpp"
#include "pfw/cegis.hpp"
#include "pfw/encoder.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/parser.hpp"
#include "pfw/printer.hpp"
#include "test_util.hpp"

using namespace pfw;

namespace {

TransitionSystem sys(const std::string& name) {
  return parse_transition_system(test::slurp("benchmarks/systems/" + name + ".ts"));
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

RelationalProblem problem(RelationalKind kind, std::vector<TransitionSystem> systems, const std::string& pre,
                          std::optional<std::string> post, const EncoderOptions& opt = {}) {
  RelationalProblem rp;
  rp.kind = kind;
  rp.systems = std::move(systems);
  rp.pre = Formula::top();
  if (post) rp.post = Formula::top();
  VarSet voc = encoding_vocabulary(rp, opt);
  rp.pre = parse_formula(pre, voc, &rp.user_preds);
  if (post) rp.post = parse_formula(*post, voc, &rp.user_preds);
  return rp;
}

PfwCsp golden(const std::string& name) { return parse_pfwcsp(test::slurp("benchmarks/golden/" + name + ".pfw")); }

EncoderOptions gni_options(bool final_everywhere) {
  EncoderOptions o;
  o.prophecy = std::vector<std::string>{"x"};
  o.prophecy_final_everywhere = final_everywhere;
  return o;
}

SmtConfig config() {
  SmtConfig c;
  c.solver_path = PFW_SMT_SOLVER_PATH;
  return c;
}

}  // namespace

TEST_SUITE("encoder") {
  TEST_CASE("k-safety clause count is 3 + 2(2^k - 1) - 1") {
    for (std::size_t k = 1; k <= 3; ++k) {
      std::string pre = "x1 = x1";
      RelationalProblem rp = problem(RelationalKind::KSafety, std::vector<TransitionSystem>(k, sys("trivial")), pre,
                                     std::string("true"));
      Encoding e = encode(rp);
      CAPTURE(k);
      CHECK(e.problem.clauses.size() == 3 + 2 * ((std::size_t{1} << k) - 1) - 1);
      CHECK(e.artifacts.sch.size() == (std::size_t{1} << k) - 1);
      CHECK(e.problem.kinding.at(e.artifacts.inv).kind == Kind::Ord);
    }
  }

  TEST_CASE("the doubleSquare encoding matches its listing") {
    RelationalProblem rp = problem(RelationalKind::KSafety, {sys("doubleSquare"), sys("doubleSquare")}, "x1 = x2",
                                   trim(test::slurp("benchmarks/posts/doubleSquare.txt")));
    Encoding e = encode(rp);
    StructuralMatch m = compare_structurally(e.problem, golden("doubleSquare"));
    CHECK_MESSAGE(m.equal, m.message);
    CHECK(e.problem.clauses.size() == 8);
  }

  TEST_CASE("symmetric co-termination matches its listing") {
    EncoderOptions o;
    o.symmetric = true;
    RelationalProblem rp =
        problem(RelationalKind::CoTermination, {sys("cotermP1"), sys("cotermP2")}, "x1 = x2 and y1 = y2", std::nullopt, o);
    Encoding e = encode(rp, o);
    StructuralMatch m = compare_structurally(e.problem, golden("cotermIntro"));
    CHECK_MESSAGE(m.equal, m.message);
  }

  TEST_CASE("asymmetric co-termination has nine clauses and kinds of its artifacts") {
    RelationalProblem rp =
        problem(RelationalKind::CoTermination, {sys("cotermP1"), sys("cotermP2")}, "x1 = x2 and y1 = y2", std::nullopt);
    Encoding e = encode(rp);
    CHECK(e.problem.clauses.size() == 9);
    const Kinding& k = e.problem.kinding;
    CHECK(k.at(e.artifacts.fnbnd).kind == Kind::FN);
    REQUIRE_FALSE(e.artifacts.wfr.empty());
    for (const auto& w : e.artifacts.wfr) {
      CHECK(k.at(w).kind == Kind::WF);
      CHECK(k.at(w).sorts.size() % 2 == 0);
    }
    // the bound is the last argument of the bound function
    CHECK(k.at(e.artifacts.fnbnd).sorts.back() == Sort::Int);
  }

  TEST_CASE("co-termination needs two systems") {
    CHECK_THROWS_AS(encode(problem(RelationalKind::CoTermination, {sys("cotermP1")}, "true", std::nullopt)), EncodeError);
  }

  TEST_CASE("TI-GNI matches its listing") {
    EncoderOptions o = gni_options(true);
    std::string pre = trim(test::slurp("benchmarks/posts/tigni_pre.txt"));
    RelationalProblem rp = problem(RelationalKind::TIGNI, {sys("tigni"), sys("tigni")}, pre, std::string("x1 = x2"), o);
    Encoding e = encode(rp, o);
    StructuralMatch m = compare_structurally(e.problem, golden("tigni"));
    CHECK_MESSAGE(m.equal, m.message);
    // the resolving function comes from the precondition
    CHECK(e.artifacts.fnr.empty());
    CHECK(e.problem.kinding.at("FN_R").kind == Kind::FN);
  }

  TEST_CASE("TS-GNI agrees with its listing except for the simplified last clause") {
    EncoderOptions o = gni_options(false);
    o.bound_args = std::vector<std::string>{"x", "h", "l"};
    std::string pre = trim(test::slurp("benchmarks/posts/gniEx_pre.txt"));
    RelationalProblem rp = problem(RelationalKind::TSGNI, {sys("gniEx"), sys("gniEx")}, pre, std::string("x1 = x2"), o);
    Encoding e = encode(rp, o);
    PfwCsp ref = golden("tsgni");
    REQUIRE(e.problem.clauses.size() == ref.clauses.size());
    // all but the last clause match
    PfwCsp a = e.problem, b = ref;
    a.clauses.pop_back();
    b.clauses.pop_back();
    StructuralMatch head = compare_structurally(a, b);
    CHECK_MESSAGE(head.equal, head.message);
    StructuralMatch whole = compare_structurally(e.problem, ref);
    CHECK_FALSE(whole.equal);
  }

  TEST_CASE("vocabulary covers copies, primes and introduced variables") {
    EncoderOptions o = gni_options(false);
    RelationalProblem rp = problem(RelationalKind::TSGNI, {sys("gniEx"), sys("gniEx")}, "true", std::string("true"), o);
    VarSet v = encoding_vocabulary(rp, o);
    CHECK(v.count("x1"));
    CHECK(v.count("x2'"));
    CHECK(v.at("h1") == Sort::Bool);
    CHECK(v.count("p_x"));
    CHECK(v.count("d"));
    CHECK(v.count("b"));
    CHECK(copy_name("x", 2, 2) == "x2''");
  }

  TEST_CASE("hints are appended and must respect the kinding") {
    PfwCsp base = golden("doubleSquare");
    PfwCsp hint = parse_pfwcsp("x1 = x2 :- Inv(x1, y1, z1, h1 : bool, x2, y2, z2, h2 : bool).\n");
    PfwCsp with = add_hints(base, hint.clauses);
    CHECK(with.clauses.size() == base.clauses.size() + 1);
    PfwCsp bad = parse_pfwcsp("x1 = x2 :- Inv(x1, x2).\n");
    CHECK_THROWS(add_hints(base, bad.clauses));
  }

  TEST_CASE("published solutions validate against the encoder's output") {
    SmtSession s(config());
    RelationalProblem rp = problem(RelationalKind::KSafety, {sys("doubleSquare"), sys("doubleSquare")}, "x1 = x2",
                                   trim(test::slurp("benchmarks/posts/doubleSquare.txt")));
    Encoding e = encode(rp);
    Candidate sol = parse_candidate(test::slurp("benchmarks/solutions/doubleSquare.sol"), &e.problem.kinding);
    CHECK(validate(sol, e.problem, s).valid);

    EncoderOptions o;
    o.symmetric = true;
    RelationalProblem ct =
        problem(RelationalKind::CoTermination, {sys("cotermP1"), sys("cotermP2")}, "x1 = x2 and y1 = y2", std::nullopt, o);
    Encoding ce = encode(ct, o);
    Candidate csol = parse_candidate(test::slurp("benchmarks/solutions/cotermIntro.sol"), &ce.problem.kinding);
    CHECK(validate(csol, ce.problem, s).valid);
  }

  TEST_CASE("lint flags a missing final self-loop") {
    SmtSession s(config());
    TransitionSystem bad = parse_transition_system("vars x.\ntrans x' = x + 1.\nfinal x >= 0.\n");
    RelationalProblem rp = problem(RelationalKind::KSafety, {bad, bad}, "true", std::string("true"));
    auto issues = lint(rp, s);
    REQUIRE_FALSE(issues.empty());
    CHECK(issues[0].check == "final-self-loop");
    RelationalProblem ok = problem(RelationalKind::KSafety, {sys("doubleSquare"), sys("doubleSquare")}, "true",
                                   std::string("true"));
    CHECK(lint(ok, s).empty());
  }

  TEST_CASE("kind names") {
    for (auto k : {RelationalKind::KSafety, RelationalKind::CoTermination, RelationalKind::TIGNI, RelationalKind::TSGNI})
      CHECK(parse_relational_kind(to_string(k)) == k);
    CHECK_FALSE(parse_relational_kind("bogus").has_value());
  }
}
