#include "pfw/example_unsat.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace pfw {

std::optional<std::vector<bool>> dpll(std::size_t num_vars, const std::vector<CnfClause>& clauses) {
  std::vector<signed char> val(num_vars, -1);
  struct Entry {
    std::size_t var;
    bool decision;
  };
  std::vector<Entry> trail;
  auto lit_value = [&](const Lit& l) -> int {
    int v = val[l.var];
    return v < 0 ? -1 : (v == static_cast<int>(l.positive));
  };
  // false on conflict
  auto propagate = [&]() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& c : clauses) {
        const Lit* unit = nullptr;
        std::size_t open = 0;
        bool satisfied = false;
        for (const auto& l : c) {
          int v = lit_value(l);
          if (v == 1) { satisfied = true; break; }
          if (v < 0) { ++open; unit = &l; }
        }
        if (satisfied) continue;
        if (open == 0) return false;
        if (open == 1) {
          val[unit->var] = unit->positive;
          trail.push_back({unit->var, false});
          changed = true;
        }
      }
    }
    return true;
  };
  // flipped decisions are recorded as non-decisions
  auto backtrack = [&]() {
    while (!trail.empty()) {
      Entry e = trail.back();
      trail.pop_back();
      bool was = val[e.var] == 1;
      val[e.var] = -1;
      if (e.decision) {
        val[e.var] = !was;
        trail.push_back({e.var, false});
        return true;
      }
    }
    return false;
  };
  for (;;) {
    if (!propagate()) {
      if (!backtrack()) return std::nullopt;
      continue;
    }
    const Lit* pick = nullptr;
    for (const auto& c : clauses) {
      bool satisfied = false;
      const Lit* open = nullptr;
      for (const auto& l : c) {
        int v = lit_value(l);
        if (v == 1) { satisfied = true; break; }
        if (v < 0 && !open) open = &l;
      }
      if (!satisfied && open) { pick = open; break; }
    }
    if (!pick) break;
    val[pick->var] = pick->positive;
    trail.push_back({pick->var, true});
  }
  std::vector<bool> out(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) out[i] = val[i] == 1;
  return out;
}

std::vector<std::vector<std::size_t>> enumerate_simple_cycles(const std::vector<std::vector<std::size_t>>& adjacency,
                                                              std::size_t limit) {
  const std::size_t n = adjacency.size();
  std::vector<std::vector<std::size_t>> cycles;
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t u = 0; u < n; ++u) {
    adj[u] = adjacency[u];
    std::sort(adj[u].begin(), adj[u].end());
    adj[u].erase(std::unique(adj[u].begin(), adj[u].end()), adj[u].end());
  }

  for (std::size_t s = 0; s < n && cycles.size() < limit; ++s) {
    // strongly connected component of s within nodes >= s (Tarjan restricted)
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<bool> in_comp(n, false);
    int counter = 0;
    std::function<void(std::size_t)> tarjan = [&](std::size_t v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (std::size_t w : adj[v]) {
        if (w < s) continue;
        if (index[w] < 0) {
          tarjan(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        if (std::find(comp.begin(), comp.end(), s) != comp.end())
          for (std::size_t c : comp) in_comp[c] = true;
      }
    };
    tarjan(s);

    std::vector<bool> blocked(n, false);
    std::vector<std::set<std::size_t>> block_map(n);
    std::vector<std::size_t> path;
    std::function<void(std::size_t)> unblock = [&](std::size_t u) {
      blocked[u] = false;
      auto pending = std::move(block_map[u]);
      block_map[u].clear();
      for (std::size_t w : pending)
        if (blocked[w]) unblock(w);
    };
    std::function<bool(std::size_t)> circuit = [&](std::size_t v) -> bool {
      bool found = false;
      path.push_back(v);
      blocked[v] = true;
      for (std::size_t w : adj[v]) {
        if (!in_comp[w] || cycles.size() >= limit) continue;
        if (w == s) {
          cycles.push_back(path);
          found = true;
        } else if (!blocked[w] && circuit(w)) {
          found = true;
        }
      }
      if (found) {
        unblock(v);
      } else {
        for (std::size_t w : adj[v])
          if (in_comp[w]) block_map[w].insert(v);
      }
      path.pop_back();
      return found;
    };
    circuit(s);
  }
  return cycles;
}

ExampleUnsatResult check_examples_unsat(const std::vector<ExampleInstance>& examples, const Kinding& kinding,
                                        const ExampleUnsatConfig& config) {
  ExampleUnsatResult result;
  std::map<GroundAtom, std::size_t> table;
  std::vector<GroundAtom> atoms;
  auto index_of = [&](const GroundAtom& a) {
    auto [it, fresh] = table.emplace(a, atoms.size());
    if (fresh) atoms.push_back(a);
    return it->second;
  };
  std::vector<CnfClause> cnf;
  for (const auto& ex : examples) {
    if (ex.trivially_true) continue;
    CnfClause c;
    for (const auto& a : ex.positive) c.push_back({index_of(a), true});
    for (const auto& a : ex.negative) c.push_back({index_of(a), false});
    cnf.push_back(std::move(c));
  }
  auto kind_of = [&](const std::string& p) {
    auto it = kinding.find(p);
    return it == kinding.end() ? Kind::Ord : it->second.kind;
  };

  for (;;) {
    ++result.rounds;
    auto model = dpll(atoms.size(), cnf);
    if (!model) {
      result.unsat = true;
      return result;
    }
    std::vector<ExampleInstance> learnt;

    // WF: one graph per predicate over half-tuples
    std::map<std::string, std::vector<std::size_t>> by_pred;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if ((*model)[i]) by_pred[atoms[i].pred].push_back(i);
    for (const auto& [pred, ids] : by_pred) {
      Kind k = kind_of(pred);
      if (k == Kind::WF) {
        std::map<std::vector<Value>, std::size_t> nodes;
        auto node = [&](std::vector<Value> v) { return nodes.emplace(std::move(v), nodes.size()).first->second; };
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_atom;
        for (std::size_t i : ids) {
          const auto& args = atoms[i].args;
          std::size_t half = args.size() / 2;
          std::size_t u = node({args.begin(), args.begin() + static_cast<std::ptrdiff_t>(half)});
          std::size_t v = node({args.begin() + static_cast<std::ptrdiff_t>(half), args.end()});
          edge_atom[{u, v}] = i;
        }
        std::vector<std::vector<std::size_t>> adj(nodes.size());
        for (const auto& [e, i] : edge_atom) adj[e.first].push_back(e.second);
        for (const auto& cyc : enumerate_simple_cycles(adj, config.cycle_limit)) {
          ExampleInstance inst;
          CnfClause c;
          for (std::size_t j = 0; j < cyc.size(); ++j) {
            std::size_t a = edge_atom.at({cyc[j], cyc[(j + 1) % cyc.size()]});
            inst.negative.push_back(atoms[a]);
            c.push_back({a, false});
          }
          cnf.push_back(std::move(c));
          learnt.push_back(inst.canonical());
        }
      } else if (k == Kind::FN) {
        std::map<std::vector<Value>, std::vector<std::size_t>> by_input;
        for (std::size_t i : ids) {
          const auto& args = atoms[i].args;
          by_input[{args.begin(), args.end() - 1}].push_back(i);
        }
        for (const auto& [in, outs] : by_input)
          for (std::size_t x = 0; x < outs.size(); ++x)
            for (std::size_t y = x + 1; y < outs.size(); ++y) {
              cnf.push_back({{outs[x], false}, {outs[y], false}});
              ExampleInstance inst;
              inst.negative = {atoms[outs[x]], atoms[outs[y]]};
              learnt.push_back(inst.canonical());
            }
      }
    }
    if (learnt.empty()) {
      for (std::size_t i = 0; i < atoms.size(); ++i) result.assignment[atoms[i]] = (*model)[i];
      return result;
    }
    result.learnt.insert(result.learnt.end(), learnt.begin(), learnt.end());
  }
}

}  // namespace pfw
