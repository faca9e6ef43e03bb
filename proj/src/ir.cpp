#include "pfw/ir.hpp"

#include <algorithm>

#include "pfw/ir_ops.hpp"

namespace pfw {

std::string_view to_string(Sort sort) { return sort == Sort::Int ? "int" : "bool"; }

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::Ord: return "ord";
    case Kind::WF: return "wf";
    case Kind::FN: return "fn";
  }
  return "?";
}

std::string_view to_string(Rel rel) {
  switch (rel) {
    case Rel::Eq: return "=";
    case Rel::Ne: return "<>";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
  }
  return "?";
}

Rel negate(Rel rel) {
  switch (rel) {
    case Rel::Eq: return Rel::Ne;
    case Rel::Ne: return Rel::Eq;
    case Rel::Le: return Rel::Gt;
    case Rel::Lt: return Rel::Ge;
    case Rel::Ge: return Rel::Lt;
    case Rel::Gt: return Rel::Le;
  }
  return rel;
}

Rel flip(Rel rel) {
  switch (rel) {
    case Rel::Le: return Rel::Ge;
    case Rel::Lt: return Rel::Gt;
    case Rel::Ge: return Rel::Le;
    case Rel::Gt: return Rel::Lt;
    default: return rel;
  }
}

// ---------------------------------------------------------------------------
// Value

Value Value::of_int(Integer v) {
  Value r;
  r.sort_ = Sort::Int;
  r.int_ = std::move(v);
  return r;
}

Value Value::of_bool(bool b) {
  Value r;
  r.sort_ = Sort::Bool;
  r.bool_ = b;
  return r;
}

const Integer& Value::as_int() const {
  if (sort_ != Sort::Int) throw Error("value is not an integer");
  return int_;
}

bool Value::as_bool() const {
  if (sort_ != Sort::Bool) throw Error("value is not a Boolean");
  return bool_;
}

std::string Value::to_string() const {
  if (sort_ == Sort::Bool) return bool_ ? "true" : "false";
  return int_.get_str();
}

bool operator==(const Value& a, const Value& b) {
  if (a.sort_ != b.sort_) return false;
  return a.sort_ == Sort::Bool ? a.bool_ == b.bool_ : a.int_ == b.int_;
}

bool operator<(const Value& a, const Value& b) {
  if (a.sort_ != b.sort_) return a.sort_ < b.sort_;
  return a.sort_ == Sort::Bool ? a.bool_ < b.bool_ : a.int_ < b.int_;
}

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
  TermKind kind = TermKind::IntLit;
  Sort sort = Sort::Int;
  std::string name;
  Integer value = 0;
  bool bool_value = false;
  std::optional<Term> lhs, rhs;
};

Term Term::var(std::string name, Sort sort) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Var;
  n->sort = sort;
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::int_lit(Integer value) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::IntLit;
  n->value = std::move(value);
  return Term(std::move(n));
}

Term Term::bool_lit(bool value) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::BoolLit;
  n->sort = Sort::Bool;
  n->bool_value = value;
  return Term(std::move(n));
}

Term Term::constant(const Value& value) {
  return value.sort() == Sort::Bool ? bool_lit(value.as_bool()) : int_lit(value.as_int());
}

Term Term::neg(Term operand) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Neg;
  n->lhs = std::move(operand);
  return Term(std::move(n));
}

Term Term::add(Term lhs, Term rhs) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Add;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Term(std::move(n));
}

Term Term::sub(Term lhs, Term rhs) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Sub;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Term(std::move(n));
}

Term Term::scale(Integer coefficient, Term operand) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Scale;
  n->value = std::move(coefficient);
  n->lhs = std::move(operand);
  return Term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
Sort Term::sort() const { return node_->sort; }
const std::string& Term::name() const { return node_->name; }
const Integer& Term::value() const { return node_->value; }
bool Term::bool_value() const { return node_->bool_value; }
const Term& Term::lhs() const { return *node_->lhs; }
const Term& Term::rhs() const { return *node_->rhs; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Var: return a.name() == b.name() && a.sort() == b.sort();
    case TermKind::IntLit: return a.value() == b.value();
    case TermKind::BoolLit: return a.bool_value() == b.bool_value();
    case TermKind::Neg: return a.lhs() == b.lhs();
    case TermKind::Scale: return a.value() == b.value() && a.lhs() == b.lhs();
    case TermKind::Add:
    case TermKind::Sub: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  FormulaKind kind = FormulaKind::True;
  std::string name;
  Rel rel = Rel::Eq;
  std::optional<Term> lhs, rhs;
  std::vector<Term> args;
  std::vector<Formula> children;
  bool has_pred = false;
};

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const Formula t = [] {
    auto n = std::make_shared<Node>();
    n->kind = FormulaKind::True;
    return Formula(std::move(n));
  }();
  return t;
}

Formula Formula::bottom() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->kind = FormulaKind::False;
    return Formula(std::move(n));
  }();
  return f;
}

Formula Formula::bool_var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::BoolVar;
  n->name = std::move(name);
  return Formula(std::move(n));
}

Formula Formula::atom(Rel rel, Term lhs, Term rhs) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Atom;
  n->rel = rel;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Formula(std::move(n));
}

Formula Formula::pred(std::string name, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::PredApp;
  n->name = std::move(name);
  n->args = std::move(args);
  n->has_pred = true;
  return Formula(std::move(n));
}

Formula Formula::lnot(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Not;
  n->has_pred = f.has_pred_app();
  n->children.push_back(std::move(f));
  return Formula(std::move(n));
}

Formula Formula::land(std::vector<Formula> fs) {
  if (fs.empty()) return top();
  if (fs.size() == 1) return fs.front();
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::And;
  for (const auto& f : fs) n->has_pred = n->has_pred || f.has_pred_app();
  n->children = std::move(fs);
  return Formula(std::move(n));
}

Formula Formula::lor(std::vector<Formula> fs) {
  if (fs.empty()) return bottom();
  if (fs.size() == 1) return fs.front();
  auto n = std::make_shared<Node>();
  n->kind = FormulaKind::Or;
  for (const auto& f : fs) n->has_pred = n->has_pred || f.has_pred_app();
  n->children = std::move(fs);
  return Formula(std::move(n));
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
Rel Formula::rel() const { return node_->rel; }
const Term& Formula::lhs() const { return *node_->lhs; }
const Term& Formula::rhs() const { return *node_->rhs; }
const std::vector<Term>& Formula::args() const { return node_->args; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const Formula& Formula::operand() const { return node_->children.front(); }
bool Formula::has_pred_app() const { return node_->has_pred; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return true;
    case FormulaKind::BoolVar: return a.name() == b.name();
    case FormulaKind::Atom: return a.rel() == b.rel() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case FormulaKind::PredApp: return a.name() == b.name() && a.args() == b.args();
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or: return a.children() == b.children();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Clause

Formula Clause::theory_part() const {
  std::vector<Formula> ds;
  if (!body_theory.empty()) ds.push_back(Formula::lnot(Formula::land(body_theory)));
  for (const auto& h : head_theory) ds.push_back(h);
  return Formula::lor(std::move(ds));
}

VarSet Clause::free_vars() const {
  VarSet out;
  for (const auto& a : positive)
    for (const auto& t : a.args) collect_vars(t, out);
  for (const auto& a : negative)
    for (const auto& t : a.args) collect_vars(t, out);
  for (const auto& f : head_theory) collect_vars(f, out);
  for (const auto& f : body_theory) collect_vars(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Ground instances

std::string GroundAtom::to_string() const {
  std::string s = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += args[i].to_string();
  }
  return s + ")";
}

bool operator<(const GroundAtom& a, const GroundAtom& b) {
  if (a.pred != b.pred) return a.pred < b.pred;
  return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

ExampleInstance ExampleInstance::canonical() const {
  ExampleInstance r = *this;
  if (r.trivially_true) return ExampleInstance{{}, {}, true};
  auto norm = [](std::vector<GroundAtom>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  norm(r.positive);
  norm(r.negative);
  for (const auto& p : r.positive) {
    if (std::binary_search(r.negative.begin(), r.negative.end(), p)) return ExampleInstance{{}, {}, true};
  }
  return r;
}

std::string ExampleInstance::to_string() const {
  if (trivially_true) return "top";
  std::string s;
  for (const auto& a : positive) {
    if (!s.empty()) s += " \\/ ";
    s += a.to_string();
  }
  for (const auto& a : negative) {
    if (!s.empty()) s += " \\/ ";
    s += "~" + a.to_string();
  }
  return s.empty() ? "bot" : s;
}

bool operator<(const ExampleInstance& a, const ExampleInstance& b) {
  if (a.trivially_true != b.trivially_true) return a.trivially_true < b.trivially_true;
  if (a.positive != b.positive)
    return std::lexicographical_compare(a.positive.begin(), a.positive.end(), b.positive.begin(), b.positive.end());
  return std::lexicographical_compare(a.negative.begin(), a.negative.end(), b.negative.begin(), b.negative.end());
}

}  // namespace pfw
