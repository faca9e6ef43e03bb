#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pfw/ir.hpp"

namespace pfw {

struct SortError {
  std::size_t clause_index = 0;
  std::string atom;  // printed offending atom or term
  std::string message;
};

/// Returns an empty list iff every clause is well-sorted against the kinding.
std::vector<SortError> check_well_sorted(const PfwCsp& problem);

/// Kind-specific shape of a signature: WF halves equal, FN has an output.
std::optional<std::string> check_signature(const std::string& pred, const PredSignature& sig);

/// Free term variables.
void collect_vars(const Term& t, VarSet& out);
void collect_vars(const Formula& f, VarSet& out);
VarSet free_vars(const Formula& f);
VarSet free_vars(const Term& t);

/// Predicate names occurring in a formula.
void collect_preds(const Formula& f, std::vector<std::string>& out);

using TermSubst = std::map<std::string, Term>;

Term substitute(const Term& t, const TermSubst& s);
Formula substitute(const Formula& f, const TermSubst& s);
PredAtom substitute(const PredAtom& a, const TermSubst& s);
Clause substitute(const Clause& c, const TermSubst& s);

/// Rename every variable through `rename`; names it maps to themselves stay.
Formula rename_vars(const Formula& f, const std::function<std::string(const std::string&)>& rename);
Clause rename_vars(const Clause& c, const std::function<std::string(const std::string&)>& rename);

class MissingDefinition : public Error {
 public:
  explicit MissingDefinition(const std::string& pred)
      : Error("missing definition for predicate variable " + pred), pred_(pred) {}
  const std::string& pred() const { return pred_; }

 private:
  std::string pred_;
};

/// beta-reduced body of sigma(pred) applied to args.
Formula apply_definition(const PredicateDefinition& def, const std::vector<Term>& args);

/// Replace every predicate application by its definition.
Formula substitute_predicates(const Formula& f, const Candidate& sigma);
Formula substitute_predicates(const Clause& c, const Candidate& sigma);
std::vector<Formula> substitute_predicates(const std::vector<Clause>& clauses, const Candidate& sigma);

class IncompleteSubstitution : public Error {
 public:
  explicit IncompleteSubstitution(const std::string& var)
      : Error("no value for variable " + var), var_(var) {}
  const std::string& var() const { return var_; }

 private:
  std::string var_;
};

Value eval(const Term& t, const Assignment& a);
/// Evaluates a formula without predicate applications.
bool eval(const Formula& f, const Assignment& a);

/// theta(c) with theory atoms folded; throws IncompleteSubstitution.
ExampleInstance ground(const Clause& c, const Assignment& theta);

/// Constant folding and flattening of nested And/Or; never changes meaning.
Formula simplify(const Formula& f);
Term simplify(const Term& t);

/// Negation normal form; negated comparisons become the complementary
/// relation, so Not only survives above BoolVar and PredApp.
Formula nnf(const Formula& f);

/// Top-level conjuncts / disjuncts (flattened through nested And / Or).
std::vector<Formula> conjuncts(const Formula& f);
std::vector<Formula> disjuncts(const Formula& f);

/// Linear normal form of an Int term: constant + sum coef*var.
struct LinearExpr {
  Integer constant = 0;
  std::map<std::string, Integer> coeffs;  // zero coefficients are dropped

  friend bool operator==(const LinearExpr& a, const LinearExpr& b) {
    return a.constant == b.constant && a.coeffs == b.coeffs;
  }
};

LinearExpr linearize(const Term& t);
Term to_term(const LinearExpr& e);

}  // namespace pfw
