#pragma once

// Satisfiability of ground example sets under WF/FN kind constraints.

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "pfw/ir.hpp"

namespace pfw {

/// Propositional CNF over variables 0..n-1; literal = (var, polarity).
struct Lit {
  std::size_t var;
  bool positive;
};
using CnfClause = std::vector<Lit>;

/// DPLL with unit propagation. Returns a total assignment or nullopt.
std::optional<std::vector<bool>> dpll(std::size_t num_vars, const std::vector<CnfClause>& clauses);

/// Elementary cycles (Johnson), each listed from its smallest node, in a
/// deterministic order. Stops after `limit` cycles.
std::vector<std::vector<std::size_t>> enumerate_simple_cycles(const std::vector<std::vector<std::size_t>>& adjacency,
                                                              std::size_t limit = 1000);

struct ExampleUnsatConfig {
  std::size_t cycle_limit = 1000;  // per WF variable per round
};

struct ExampleUnsatResult {
  bool unsat = false;
  std::map<GroundAtom, bool> assignment;  // when satisfiable
  std::vector<ExampleInstance> learnt;
  std::size_t rounds = 0;
};

/// Trivially-true instances are ignored. Predicates missing from the
/// kinding are treated as Ord.
ExampleUnsatResult check_examples_unsat(const std::vector<ExampleInstance>& examples, const Kinding& kinding,
                                        const ExampleUnsatConfig& config = {});

}  // namespace pfw
