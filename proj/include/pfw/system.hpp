#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pfw/ir.hpp"

namespace pfw {

using VarList = std::vector<std::pair<std::string, Sort>>;

/// A symbolic transition system. Primed names (x') denote next-state values;
/// for finitary angelic branching the k-th successor copy uses k primes.
struct TransitionSystem {
  VarList vars;
  std::set<std::string> consts;  // never change; not part of the primed vector
  Formula trans;                 // T(x, x')
  Formula final;                 // F(x)
  std::optional<Formula> init;   // conjoined into the precondition for each copy
  VarList choice_vars;           // r
  std::optional<Formula> choice_trans;  // U(r, x, x')
  int successors = 0;                   // > 0 selects the head-disjunction form
  std::optional<Formula> angelic_trans; // over x, x', x'', ...

  VarList state_vars() const;  // vars minus consts
};

}  // namespace pfw
