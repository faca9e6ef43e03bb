#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pfw/ir.hpp"
#include "pfw/system.hpp"

namespace pfw {

struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  int line = 1;
  int column = 1;
};

struct Diagnostic {
  SourceSpan span;
  std::string message;

  std::string to_string() const;
};

class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

/// Textual pfwCSP. Throws ParseError carrying every diagnostic found.
PfwCsp parse_pfwcsp(std::string_view text);

/// Definitions "X(a, b : bool) := body." Parameter sorts come from
/// annotations, then from `kinding` when given, then from use.
Candidate parse_candidate(std::string_view text, const Kinding* kinding = nullptr);

/// A single formula. Variables listed in `known` take that sort; others are
/// inferred from use. Predicate applications are allowed; their kinds are
/// added to `preds` (by name prefix) when it is non-null.
Formula parse_formula(std::string_view text, const VarSet& known = {}, Kinding* preds = nullptr);

/// Sections: vars, const, init, trans, final, choice, choice_trans,
/// successors, angelic_trans. Each ends with '.'.
TransitionSystem parse_transition_system(std::string_view text);

/// Clauses equivalent to (/\ body) => (\/ heads); predicate applications
/// under Boolean structure are split out by distribution.
std::vector<Clause> make_clauses(const std::vector<Formula>& heads, const std::vector<Formula>& body);

/// Kind implied by a predicate name: WF_ and FN_ prefixes, else Ord.
Kind default_kind(const std::string& pred);

}  // namespace pfw
