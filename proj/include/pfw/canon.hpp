#pragma once

// Canonical forms used for structural comparison of constraint sets modulo
// renaming, and for cheap syntactic reasoning (complementary literals).

#include <map>
#include <set>
#include <string>

#include "pfw/ir.hpp"

namespace pfw {

/// Int comparisons become `e <= 0`, `e = 0` or `e <> 0` over a gcd-reduced
/// linear form; Boolean equalities become literals where possible.
Formula canonical_atom(const Formula& atom);

/// Order-insensitive text for a formula in NNF with canonical atoms.
std::string canonical_text(const Formula& f);

/// Literal-level complement test on canonical forms.
bool complementary(const Formula& a, const Formula& b);

/// The clause as a set of canonical disjuncts of  !body \/ head.
std::set<std::string> clause_disjuncts(const Clause& c);

struct StructuralMatch {
  bool equal = false;
  std::map<std::string, std::string> pred_map;  // left name -> right name
  std::string message;                           // first difference when unequal
};

/// Equality of two constraint sets modulo predicate renaming (within equal
/// kinds and signatures) and per-clause variable renaming.
StructuralMatch compare_structurally(const PfwCsp& left, const PfwCsp& right);

}  // namespace pfw
