#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/printer.hpp"
#include "pfw/templates.hpp"

using namespace pfw;

namespace {

SmtConfig config() {
  SmtConfig c;
  c.solver_path = PFW_SMT_SOLVER_PATH;
  return c;
}

PredParams params(Kind k, std::map<std::string, int> vals) {
  PredParams p = initial_params(k);
  for (auto& [n, v] : vals) p.values[n] = v;
  return p;
}

GroundAtom atom(const std::string& p, std::vector<int> args) {
  GroundAtom a{p, {}};
  for (int v : args) a.args.push_back(Value::of_int(v));
  return a;
}

ExampleInstance unit(const GroundAtom& a, bool pos = true) {
  ExampleInstance e;
  (pos ? e.positive : e.negative).push_back(a);
  return e;
}

bool satisfies_constraints(const Template& t, const Assignment& a) {
  for (const auto& [l, f] : t.bounds())
    if (!eval(f, a)) return false;
  for (const auto& f : t.domains())
    if (!eval(f, a)) return false;
  return true;
}

// all assignments of the unknowns in [-r, r] satisfying the constraints
std::vector<Assignment> enumerate(const Template& t, int r) {
  auto us = t.unknowns();
  std::vector<Assignment> out;
  std::vector<int> vals(us.size(), -r);
  for (;;) {
    Assignment a;
    for (std::size_t i = 0; i < us.size(); ++i) {
      a[us[i]] = Value::of_int(vals[i]);
      a[us[i] + "!abs"] = Value::of_int(vals[i] < 0 ? -vals[i] : vals[i]);
    }
    if (satisfies_constraints(t, a)) out.push_back(a);
    std::size_t i = 0;
    while (i < vals.size() && vals[i] == r) vals[i++] = -r;
    if (i == vals.size()) break;
    ++vals[i];
  }
  return out;
}

bool holds(const Candidate& c, const ExampleInstance& e) {
  for (const auto& a : e.positive)
    if (oracle::holds(c.at(a.pred), a.args)) return true;
  for (const auto& a : e.negative)
    if (!oracle::holds(c.at(a.pred), a.args)) return true;
  return false;
}

}  // namespace

TEST_SUITE("templates") {
  TEST_CASE("arity-one ordinary template at (1,1,1,0) expresses exactly three predicates") {
    Template t("P", {Kind::Ord, {Sort::Int}}, params(Kind::Ord, {{"nd", 1}, {"nc", 1}, {"ac", 1}, {"ad", 0}}));
    auto all = enumerate(t, 2);
    CHECK(all.size() == 3);  // c1 in {-1,0,1}, c0 = 0
    std::set<std::vector<bool>> extensions;
    for (const auto& a : all) {
      PredicateDefinition d = t.extract(a);
      std::vector<bool> ext;
      for (int x = -3; x <= 3; ++x) ext.push_back(oracle::holds(d, {Value::of_int(x)}));
      extensions.insert(ext);
    }
    CHECK(extensions.size() == 3);
  }

  TEST_CASE("the solution space at fixed parameters is finite and grows with them") {
    Template small("P", {Kind::Ord, {Sort::Int}}, params(Kind::Ord, {{"ac", 1}, {"ad", 0}}));
    Template wider("P", {Kind::Ord, {Sort::Int}}, params(Kind::Ord, {{"ac", 1}, {"ad", 1}}));
    CHECK(enumerate(small, 3).size() == 3);
    CHECK(enumerate(wider, 3).size() == 9);
  }

  TEST_CASE("arity zero is a Boolean constant") {
    SmtSession s(config());
    Kinding k{{"P", {Kind::Ord, {}}}};
    auto pos = synthesize({unit({"P", {}})}, k, initial_params(k), s);
    REQUIRE(pos.status == SynthesisResult::Status::Found);
    CHECK(eval(pos.candidate.at("P").body, {}));
    auto neg = synthesize({unit({"P", {}}, false)}, k, initial_params(k), s);
    REQUIRE(neg.status == SynthesisResult::Status::Found);
    CHECK_FALSE(eval(neg.candidate.at("P").body, {}));
  }

  TEST_CASE("Boolean arguments become guards") {
    SmtSession s(config());
    Kinding k{{"P", {Kind::Ord, {Sort::Bool, Sort::Int}}}};
    std::vector<ExampleInstance> ex{unit({"P", {Value::of_bool(true), Value::of_int(0)}}),
                                    unit({"P", {Value::of_bool(false), Value::of_int(0)}}, false)};
    auto r = synthesize(ex, k, initial_params(k), s);
    REQUIRE(r.status == SynthesisResult::Status::Found);
    for (const auto& e : ex) CHECK(holds(r.candidate, e));
  }

  TEST_CASE("synthesis separates P(0) from not P(1)") {
    SmtSession s(config());
    Kinding k{{"P", {Kind::Ord, {Sort::Int}}}};
    TemplateParams p{{"P", params(Kind::Ord, {{"nd", 1}, {"nc", 1}, {"ac", 2}, {"ad", 1}})}};
    std::vector<ExampleInstance> ex{unit(atom("P", {0})), unit(atom("P", {1}), false)};
    auto r = synthesize(ex, k, p, s);
    REQUIRE(r.status == SynthesisResult::Status::Found);
    for (const auto& e : ex) CHECK(holds(r.candidate, e));
    // brute force agrees that the space has a separating predicate
    Template t("P", k.at("P"), p.at("P"));
    bool any = false;
    for (const auto& a : enumerate(t, 2)) {
      Candidate c{{"P", t.extract(a)}};
      any = any || (holds(c, ex[0]) && holds(c, ex[1]));
    }
    CHECK(any);
  }

  TEST_CASE("a direct contradiction yields a core with both examples") {
    SmtSession s(config());
    Kinding k{{"P", {Kind::Ord, {Sort::Int}}}};
    auto r = synthesize({unit(atom("P", {0})), unit(atom("P", {0}), false)}, k, initial_params(k), s);
    REQUIRE(r.status == SynthesisResult::Status::NoCandidate);
    CHECK(r.core.count("ex_0"));
    CHECK(r.core.count("ex_1"));
    CHECK(r.implicated == std::set<std::string>{"P"});
  }

  TEST_CASE("a single descending pair is expressible at minimal WF parameters") {
    SmtSession s(config());
    Kinding k{{"W", {Kind::WF, {Sort::Int, Sort::Int}}}};
    auto r = synthesize({unit(atom("W", {1, 0}))}, k, initial_params(k), s);
    REQUIRE(r.status == SynthesisResult::Status::Found);
    CHECK(oracle::holds(r.candidate.at("W"), {Value::of_int(1), Value::of_int(0)}));
  }

  TEST_CASE("the classic ranking relation at minimal WF parameters") {
    Template t("W", {Kind::WF, {Sort::Int, Sort::Int}}, initial_params(Kind::WF));
    // pick r = x and a trivial discriminator through the solver
    SmtSession s(config());
    Kinding k{{"W", t.signature()}};
    std::vector<ExampleInstance> ex;
    for (int x = 0; x <= 3; ++x) ex.push_back(unit(atom("W", {x + 1, x})));
    ex.push_back(unit(atom("W", {0, 1}), false));
    auto r = synthesize(ex, k, initial_params(k), s);
    REQUIRE(r.status == SynthesisResult::Status::Found);
    for (const auto& e : ex) CHECK(holds(r.candidate, e));
    CHECK_FALSE(oracle::wf_grid_cycles(r.candidate.at("W"), 1, 4).dfs_cycle);
  }

  TEST_CASE("a prophecy-copy function is expressible with one piece") {
    SmtSession s(config());
    Kinding k{{"FN_R", {Kind::FN, {Sort::Int, Sort::Bool, Sort::Int, Sort::Int}}}};
    auto f = [](int p, bool h, int l, int x) {
      return GroundAtom{"FN_R", {Value::of_int(p), Value::of_bool(h), Value::of_int(l), Value::of_int(x)}};
    };
    std::vector<ExampleInstance> ex{unit(f(1, true, 0, 1)), unit(f(-2, false, 5, -2)), unit(f(0, true, 3, 0)),
                                    unit(f(4, true, 4, 3), false)};
    auto r = synthesize(ex, k, initial_params(k), s);
    REQUIRE(r.status == SynthesisResult::Status::Found);
    const auto& d = r.candidate.at("FN_R");
    CHECK(oracle::holds(d, {Value::of_int(7), Value::of_bool(false), Value::of_int(-3), Value::of_int(7)}));
  }

  TEST_CASE("a constant bound function at ec = 0") {
    SmtSession s(config());
    Kinding k{{"FN_DB", {Kind::FN, {Sort::Int, Sort::Int, Sort::Int}}}};
    TemplateParams p{{"FN_DB", params(Kind::FN, {{"ec", 0}, {"ed", 1}})}};
    auto r = synthesize({unit(atom("FN_DB", {0, 0, 1})), unit(atom("FN_DB", {5, -3, 1}))}, k, p, s);
    REQUIRE(r.status == SynthesisResult::Status::Found);
    CHECK(to_text(r.candidate.at("FN_DB").body) == "r = 1");
  }

  TEST_CASE("sampled coefficients satisfy the bound constraints") {
    std::mt19937_64 rng(5);
    for (Kind kind : {Kind::Ord, Kind::WF, Kind::FN}) {
      for (int i = 0; i < 40; ++i) {
        PredSignature sig{kind, {Sort::Int, Sort::Bool, Sort::Int, Sort::Int}};
        Template t("X", sig, oracle::random_params(kind, rng));
        CHECK(satisfies_constraints(t, t.sample(rng)));
      }
    }
  }

  TEST_CASE("sampled WF relations have no cycles on a small grid") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 60; ++i) {
      std::size_t arity = i % 2 ? 4 : 2;
      PredSignature sig{Kind::WF, std::vector<Sort>(arity, Sort::Int)};
      TemplateOptions opts;
      opts.base_wf_family = i % 3 == 0;
      Template t("W", sig, oracle::random_params(Kind::WF, rng), opts);
      PredicateDefinition d = t.extract(t.sample(rng));
      auto g = oracle::wf_grid_cycles(d, arity / 2, arity == 2 ? 4 : 2);
      CAPTURE(to_text(d.body));
      CHECK(g.cycles == 0);
      CHECK_FALSE(g.dfs_cycle);
    }
  }

  TEST_CASE("sampled FN relations are total functions on a small grid") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 60; ++i) {
      std::size_t arity = 2 + i % 2;
      PredParams p = oracle::random_params(Kind::FN, rng);
      Template t("F", {Kind::FN, std::vector<Sort>(arity, Sort::Int)}, p);
      PredicateDefinition d = t.extract(t.sample(rng));
      CAPTURE(to_text(d.body));
      CHECK(oracle::fn_total_on_grid(d, arity - 1, 3, p["ed"] + p["ec"] * 3 + 1));
    }
  }

  TEST_CASE("growth bumps the next parameter in the rotation") {
    Kinding k{{"P", {Kind::Ord, {Sort::Int}}}, {"Q", {Kind::Ord, {Sort::Int}}}};
    TemplateParams p = initial_params(k);
    TemplateParams q = update_params(p, {"P"});
    CHECK(q.at("P")["nd"] == 2);
    CHECK(q.at("P")["nc"] == 1);
    CHECK(q.at("P")["ac"] == 1);
    CHECK(q.at("P")["ad"] == 1);
    CHECK(q.at("Q").values == p.at("Q").values);
  }

  TEST_CASE("growth follows the documented orders") {
    for (auto [kind, order] : std::vector<std::pair<Kind, std::vector<std::string>>>{
             {Kind::Ord, {"nd", "nc", "ad", "ac"}},
             {Kind::WF, {"nl", "np", "nc", "rd", "rc", "dd", "dc"}},
             {Kind::FN, {"nd", "nc", "ed", "ec", "dd", "dc"}}}) {
      Kinding k{{"X", {kind, {Sort::Int, Sort::Int}}}};
      TemplateParams p = initial_params(k);
      for (const auto& name : order) {
        TemplateParams q = update_params(p, {"X"});
        CHECK(q.at("X")[name] == p.at("X")[name] + 1);
        p = q;
      }
    }
  }

  TEST_CASE("twenty consecutive updates raise every parameter") {
    for (Kind kind : {Kind::Ord, Kind::WF, Kind::FN}) {
      Kinding k{{"P", {kind, {Sort::Int, Sort::Int}}}, {"R", {kind, {Sort::Int, Sort::Int}}}};
      TemplateParams p = initial_params(k);
      // start from a state reached by some earlier updates
      for (int i = 0; i < 3; ++i) p = update_params(p, {"P", "R"});
      TemplateParams start = p;
      for (int i = 0; i < 20; ++i) p = update_params(p, {"P"});
      for (const auto& n : param_names(kind)) CHECK(p.at("P")[n] > start.at("P")[n]);
    }
  }

  TEST_CASE("each implicated predicate gets one increment") {
    Kinding k{{"P", {Kind::Ord, {Sort::Int}}}, {"W", {Kind::WF, {Sort::Int, Sort::Int}}}};
    TemplateParams p = initial_params(k);
    TemplateParams q = update_params(p, {"P", "W"});
    auto total = [](const PredParams& pp) {
      int s = 0;
      for (auto& [n, v] : pp.values) s += v;
      return s;
    };
    CHECK(total(q.at("P")) == total(p.at("P")) + 1);
    CHECK(total(q.at("W")) == total(p.at("W")) + 1);
  }

  TEST_CASE("lagging parameters catch up across predicates of a kind") {
    Kinding k{{"P", {Kind::Ord, {Sort::Int}}}, {"Q", {Kind::Ord, {Sort::Int}}}};
    TemplateParams p = initial_params(k);
    p.at("P").values["nd"] = 5;
    TemplateParams q = update_params(p, {"Q"});
    CHECK(q.at("Q")["nd"] == 2);
  }

  TEST_CASE("a candidate at some parameters remains reachable at larger ones") {
    SmtSession s(config());
    Kinding k{{"P", {Kind::Ord, {Sort::Int, Sort::Int}}}};
    std::vector<ExampleInstance> ex{unit(atom("P", {0, 0})), unit(atom("P", {1, 1})), unit(atom("P", {1, 0}), false)};
    TemplateParams p = initial_params(k);
    p.at("P").values["ac"] = 2;
    p.at("P").values["nc"] = 2;
    REQUIRE(synthesize(ex, k, p, s).status == SynthesisResult::Status::Found);
    TemplateParams bigger = p;
    for (auto& [n, v] : bigger.at("P").values) ++v;
    auto r = synthesize(ex, k, bigger, s);
    REQUIRE(r.status == SynthesisResult::Status::Found);
    for (const auto& e : ex) CHECK(holds(r.candidate, e));
  }

  TEST_CASE("parameter overrides") {
    Kinding k{{"Inv", {Kind::Ord, {Sort::Int}}}, {"W", {Kind::WF, {Sort::Int, Sort::Int}}}};
    TemplateParams p = initial_params(k);
    apply_param_overrides(p, "ord:nc=3;Inv:ad=0;*:dd=2");
    CHECK(p.at("Inv")["nc"] == 3);
    CHECK(p.at("Inv")["ad"] == 0);
    CHECK(p.at("W")["dd"] == 2);
    CHECK_THROWS(apply_param_overrides(p, "Inv:zz=1"));
  }
}
