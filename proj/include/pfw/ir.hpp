#pragma once

// Many-sorted IR for pfwCSP constraints: linear integer terms, quantifier-free
// formulas over Int/Bool, clauses with predicate-variable atoms, kindings,
// predicate substitutions and ground example instances.
//
// All IR values are immutable after construction and share structure through
// reference-counted nodes, so copies are cheap and safe to hand across threads.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pfw {

using Integer = mpz_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Sort : std::uint8_t { Int, Bool };

std::string_view to_string(Sort sort);

/// A constant of sort Int or Bool.
class Value {
 public:
  Value() = default;
  static Value of_int(Integer v);
  static Value of_bool(bool b);

  Sort sort() const { return sort_; }
  const Integer& as_int() const;
  bool as_bool() const;
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  friend bool operator<(const Value& a, const Value& b);

 private:
  Sort sort_ = Sort::Int;
  Integer int_ = 0;
  bool bool_ = false;
};

using Assignment = std::map<std::string, Value>;
using VarSet = std::map<std::string, Sort>;

// ---------------------------------------------------------------------------
// Terms

enum class TermKind : std::uint8_t { Var, IntLit, BoolLit, Neg, Add, Sub, Scale };

class Term {
 public:
  static Term var(std::string name, Sort sort = Sort::Int);
  static Term int_lit(Integer value);
  static Term bool_lit(bool value);
  static Term constant(const Value& value);
  static Term neg(Term operand);
  static Term add(Term lhs, Term rhs);
  static Term sub(Term lhs, Term rhs);
  /// coefficient * operand; the coefficient is always a literal (QFLIA).
  static Term scale(Integer coefficient, Term operand);

  TermKind kind() const;
  Sort sort() const;
  const std::string& name() const;
  /// IntLit value, or the coefficient of a Scale node.
  const Integer& value() const;
  bool bool_value() const;
  /// Operand of Neg/Scale, left operand of Add/Sub.
  const Term& lhs() const;
  const Term& rhs() const;

  bool is_var() const { return kind() == TermKind::Var; }
  bool is_constant() const { return kind() == TermKind::IntLit || kind() == TermKind::BoolLit; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Formulas

enum class Rel : std::uint8_t { Eq, Ne, Le, Lt, Ge, Gt };

std::string_view to_string(Rel rel);
Rel negate(Rel rel);
/// The relation obtained by swapping operands: a < b  <=>  b > a.
Rel flip(Rel rel);

enum class FormulaKind : std::uint8_t { True, False, BoolVar, Atom, PredApp, Not, And, Or };

class Formula {
 public:
  Formula();  // True

  static Formula top();
  static Formula bottom();
  static Formula constant(bool b) { return b ? top() : bottom(); }
  static Formula bool_var(std::string name);
  static Formula atom(Rel rel, Term lhs, Term rhs);
  static Formula pred(std::string name, std::vector<Term> args);
  static Formula lnot(Formula f);
  static Formula land(std::vector<Formula> fs);
  static Formula lor(std::vector<Formula> fs);
  static Formula land(Formula a, Formula b) { return land(std::vector<Formula>{std::move(a), std::move(b)}); }
  static Formula lor(Formula a, Formula b) { return lor(std::vector<Formula>{std::move(a), std::move(b)}); }
  static Formula implies(Formula a, Formula b) { return lor(lnot(std::move(a)), std::move(b)); }

  FormulaKind kind() const;
  /// BoolVar name or PredApp predicate name.
  const std::string& name() const;
  Rel rel() const;
  const Term& lhs() const;
  const Term& rhs() const;
  const std::vector<Term>& args() const;
  const std::vector<Formula>& children() const;
  /// Operand of Not.
  const Formula& operand() const;

  bool is_true() const { return kind() == FormulaKind::True; }
  bool is_false() const { return kind() == FormulaKind::False; }
  bool has_pred_app() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Clauses and problems

struct PredAtom {
  std::string pred;
  std::vector<Term> args;

  Formula to_formula() const { return Formula::pred(pred, args); }
  friend bool operator==(const PredAtom& a, const PredAtom& b) { return a.pred == b.pred && a.args == b.args; }
};

/// phi \/ X1(t1) \/ ... \/ Xl(tl) \/ ~X(l+1)(..) \/ ... \/ ~Xm(tm)
///
/// The theory part phi is kept split as (/\ body_theory) => (\/ head_theory),
/// which is how clauses are written and printed; theory_part() recovers phi.
struct Clause {
  std::vector<PredAtom> positive;
  std::vector<PredAtom> negative;
  std::vector<Formula> head_theory;
  std::vector<Formula> body_theory;

  Formula theory_part() const;
  VarSet free_vars() const;
};

enum class Kind : std::uint8_t { Ord, WF, FN };

std::string_view to_string(Kind kind);

struct PredSignature {
  Kind kind = Kind::Ord;
  std::vector<Sort> sorts;

  friend bool operator==(const PredSignature& a, const PredSignature& b) {
    return a.kind == b.kind && a.sorts == b.sorts;
  }
};

using Kinding = std::map<std::string, PredSignature>;

struct PfwCsp {
  std::vector<Clause> clauses;
  Kinding kinding;
};

/// lambda params. body, with body free of predicate applications.
struct PredicateDefinition {
  std::vector<std::pair<std::string, Sort>> params;
  Formula body;
};

using Candidate = std::map<std::string, PredicateDefinition>;

// ---------------------------------------------------------------------------
// Ground instances

struct GroundAtom {
  std::string pred;
  std::vector<Value> args;

  std::string to_string() const;
  friend bool operator==(const GroundAtom& a, const GroundAtom& b) { return a.pred == b.pred && a.args == b.args; }
  friend bool operator<(const GroundAtom& a, const GroundAtom& b);
};

/// A ground clause: \/ positive \/ ~negative. Theory parts have been folded
/// away; if one folded to true the instance is trivially true.
struct ExampleInstance {
  std::vector<GroundAtom> positive;
  std::vector<GroundAtom> negative;
  bool trivially_true = false;

  bool empty() const { return !trivially_true && positive.empty() && negative.empty(); }
  /// Sorted, deduplicated literals; P \/ ~P makes the instance trivially true.
  ExampleInstance canonical() const;
  std::string to_string() const;

  friend bool operator==(const ExampleInstance& a, const ExampleInstance& b) {
    return a.trivially_true == b.trivially_true && a.positive == b.positive && a.negative == b.negative;
  }
  friend bool operator<(const ExampleInstance& a, const ExampleInstance& b);
};

}  // namespace pfw
