#pragma once

#include <string>

#include "pfw/ir.hpp"

namespace pfw {

std::string to_text(const Term& t);
std::string to_text(const Formula& f);
std::string to_text(const Clause& c);

/// Declarations for every kinded predicate followed by the clauses; the
/// output re-parses to the same problem up to variable naming.
std::string print_pfwcsp(const PfwCsp& problem);

/// "X(a, b : bool) := body." per entry.
std::string print_candidate(const Candidate& sigma);

}  // namespace pfw
