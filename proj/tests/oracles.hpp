#pragma once

// Independent reference implementations used by tests and the acceptance
// binary. They share nothing with the code under test beyond the IR types.

#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "pfw/example_unsat.hpp"
#include "pfw/ir.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/templates.hpp"

namespace oracle {

using namespace pfw;

/// Does the directed graph (edges between value tuples) contain a cycle?
inline bool has_cycle(const std::set<std::pair<std::vector<Value>, std::vector<Value>>>& edges) {
  std::map<std::vector<Value>, std::vector<std::vector<Value>>> adj;
  for (const auto& [a, b] : edges) adj[a].push_back(b);
  std::map<std::vector<Value>, int> color;  // 0 white, 1 grey, 2 black
  std::function<bool(const std::vector<Value>&)> dfs = [&](const std::vector<Value>& v) {
    color[v] = 1;
    for (const auto& w : adj[v]) {
      if (color[w] == 1) return true;
      if (color[w] == 0 && dfs(w)) return true;
    }
    color[v] = 2;
    return false;
  };
  for (const auto& [v, _] : adj)
    if (color[v] == 0 && dfs(v)) return true;
  return false;
}

/// Exhaustive satisfiability of ground examples: every assignment of the
/// atoms is tried and filtered by acyclicity (WF) and functionality (FN).
inline bool brute_force_sat(const std::vector<ExampleInstance>& examples, const Kinding& kinding) {
  std::vector<GroundAtom> atoms;
  std::map<GroundAtom, std::size_t> index;
  for (const auto& e : examples) {
    if (e.trivially_true) continue;
    for (const auto* side : {&e.positive, &e.negative})
      for (const auto& a : *side)
        if (index.emplace(a, atoms.size()).second) atoms.push_back(a);
  }
  const std::size_t n = atoms.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    auto val = [&](const GroundAtom& a) { return ((mask >> index.at(a)) & 1) != 0; };
    bool ok = true;
    for (const auto& e : examples) {
      if (e.trivially_true) continue;
      bool sat = false;
      for (const auto& a : e.positive) sat = sat || val(a);
      for (const auto& a : e.negative) sat = sat || !val(a);
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const auto& [pred, sig] : kinding) {
      if (sig.kind == Kind::WF) {
        std::set<std::pair<std::vector<Value>, std::vector<Value>>> edges;
        for (const auto& a : atoms)
          if (a.pred == pred && val(a)) {
            std::size_t h = a.args.size() / 2;
            edges.insert({std::vector<Value>(a.args.begin(), a.args.begin() + h),
                          std::vector<Value>(a.args.begin() + h, a.args.end())});
          }
        if (has_cycle(edges)) ok = false;
      } else if (sig.kind == Kind::FN) {
        std::map<std::vector<Value>, Value> out;
        for (const auto& a : atoms)
          if (a.pred == pred && val(a)) {
            std::vector<Value> in(a.args.begin(), a.args.end() - 1);
            auto [it, fresh] = out.emplace(in, a.args.back());
            if (!fresh && it->second != a.args.back()) ok = false;
          }
      }
      if (!ok) break;
    }
    if (ok) return true;
  }
  return false;
}

/// Random ground example set over P (Ord, 1), W (WF, 2) and F (FN, 2) with
/// values in {0,1,2} and at most `max_atoms` distinct atoms.
struct RandomExamples {
  std::vector<ExampleInstance> examples;
  Kinding kinding;
};

inline RandomExamples random_examples(std::mt19937_64& rng, std::size_t max_atoms = 14, std::size_t max_clauses = 12) {
  RandomExamples r;
  r.kinding = {{"P", {Kind::Ord, {Sort::Int}}}, {"W", {Kind::WF, {Sort::Int, Sort::Int}}}, {"F", {Kind::FN, {Sort::Int, Sort::Int}}}};
  std::vector<GroundAtom> all;
  for (int a = 0; a < 3; ++a) all.push_back({"P", {Value::of_int(a)}});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      all.push_back({"W", {Value::of_int(a), Value::of_int(b)}});
      all.push_back({"F", {Value::of_int(a), Value::of_int(b)}});
    }
  std::shuffle(all.begin(), all.end(), rng);
  std::uniform_int_distribution<std::size_t> pool_size(2, max_atoms);
  all.resize(std::min(all.size(), pool_size(rng)));
  std::uniform_int_distribution<std::size_t> nclauses(1, max_clauses), width(1, 3), pick(0, all.size() - 1);
  std::bernoulli_distribution positive(0.55);
  std::size_t m = nclauses(rng);
  for (std::size_t i = 0; i < m; ++i) {
    ExampleInstance e;
    std::size_t w = width(rng);
    for (std::size_t j = 0; j < w; ++j) (positive(rng) ? e.positive : e.negative).push_back(all[pick(rng)]);
    r.examples.push_back(e.canonical());
  }
  return r;
}

/// Random parameters for a kind, shape parameters in [1,hi] and bounds in [0,hi].
inline PredParams random_params(Kind kind, std::mt19937_64& rng, int hi = 2) {
  PredParams p = initial_params(kind);
  for (const auto& n : param_names(kind)) {
    bool shape = n == "nd" || n == "nc" || n == "np" || n == "nl";
    p.values[n] = std::uniform_int_distribution<int>(shape ? 1 : 0, hi)(rng);
  }
  if (kind == Kind::Ord || kind == Kind::FN) p.values["nd"] = std::max(1, p.values["nd"]);
  return p;
}

/// All tuples of `arity` integers in [-b, b].
inline std::vector<std::vector<Value>> grid(std::size_t arity, int b) {
  std::vector<std::vector<Value>> out{{}};
  for (std::size_t i = 0; i < arity; ++i) {
    std::vector<std::vector<Value>> next;
    for (const auto& t : out)
      for (int v = -b; v <= b; ++v) {
        auto u = t;
        u.push_back(Value::of_int(v));
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

inline bool holds(const PredicateDefinition& def, const std::vector<Value>& args) {
  Assignment a;
  for (std::size_t i = 0; i < args.size(); ++i) a[def.params[i].first] = args[i];
  return eval(def.body, a);
}

/// Number of simple cycles of the WF relation restricted to [-b,b]^half,
/// counted up to `limit` with the library's cycle enumerator, and
/// cross-checked against a DFS cycle test.
struct WfGridResult {
  std::size_t cycles = 0;
  bool dfs_cycle = false;
};

inline WfGridResult wf_grid_cycles(const PredicateDefinition& def, std::size_t half, int b) {
  auto nodes = grid(half, b);
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  std::set<std::pair<std::vector<Value>, std::vector<Value>>> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      std::vector<Value> args = nodes[i];
      args.insert(args.end(), nodes[j].begin(), nodes[j].end());
      if (holds(def, args)) {
        adj[i].push_back(j);
        edges.insert({nodes[i], nodes[j]});
      }
    }
  WfGridResult r;
  r.cycles = enumerate_simple_cycles(adj, 1).size();
  r.dfs_cycle = has_cycle(edges);
  return r;
}

/// Is the FN relation a total function on [-b,b]^(arity-1)? Outputs are
/// searched in [-range, range].
inline bool fn_total_on_grid(const PredicateDefinition& def, std::size_t inputs, int b, int range) {
  for (const auto& in : grid(inputs, b)) {
    int count = 0;
    for (int r = -range; r <= range; ++r) {
      auto args = in;
      args.push_back(Value::of_int(r));
      count += holds(def, args) ? 1 : 0;
    }
    if (count != 1) return false;
  }
  return true;
}

}  // namespace oracle
