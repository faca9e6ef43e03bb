#include "pfw/ir_ops.hpp"

#include <algorithm>

#include "pfw/printer.hpp"

namespace pfw {

// ---------------------------------------------------------------------------
// Sort checking

namespace {

struct SortChecker {
  const Kinding& kinding;
  std::size_t clause_index;
  std::vector<SortError>& errors;
  VarSet scope;

  void fail(const std::string& atom, const std::string& msg) { errors.push_back({clause_index, atom, msg}); }

  void bind(const std::string& name, Sort s, const std::string& where) {
    auto [it, fresh] = scope.emplace(name, s);
    if (!fresh && it->second != s)
      fail(where, "variable " + name + " used both as " + std::string(to_string(it->second)) + " and " +
                      std::string(to_string(s)));
  }

  // returns the sort of t, or nullopt after reporting
  std::optional<Sort> term(const Term& t, const std::string& where) {
    switch (t.kind()) {
      case TermKind::Var: bind(t.name(), t.sort(), where); return t.sort();
      case TermKind::IntLit: return Sort::Int;
      case TermKind::BoolLit: return Sort::Bool;
      case TermKind::Neg:
      case TermKind::Scale: {
        auto s = term(t.lhs(), where);
        if (s && *s != Sort::Int) fail(where, "arithmetic on a Boolean term");
        return Sort::Int;
      }
      case TermKind::Add:
      case TermKind::Sub: {
        auto a = term(t.lhs(), where);
        auto b = term(t.rhs(), where);
        if ((a && *a != Sort::Int) || (b && *b != Sort::Int)) fail(where, "arithmetic on a Boolean term");
        return Sort::Int;
      }
    }
    return std::nullopt;
  }

  void formula(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False: return;
      case FormulaKind::BoolVar: bind(f.name(), Sort::Bool, f.name()); return;
      case FormulaKind::Atom: {
        std::string where = to_text(f);
        auto a = term(f.lhs(), where);
        auto b = term(f.rhs(), where);
        if (!a || !b) return;
        if (*a != *b) {
          fail(where, "comparison between different sorts");
        } else if (*a == Sort::Bool && f.rel() != Rel::Eq && f.rel() != Rel::Ne) {
          fail(where, "ordering on Boolean terms");
        }
        return;
      }
      case FormulaKind::PredApp: pred(f.name(), f.args()); return;
      case FormulaKind::Not:
      case FormulaKind::And:
      case FormulaKind::Or:
        for (const auto& c : f.children()) formula(c);
        return;
    }
  }

  void pred(const std::string& name, const std::vector<Term>& args) {
    std::string where = to_text(Formula::pred(name, args));
    auto it = kinding.find(name);
    if (it == kinding.end()) {
      fail(where, "undeclared predicate variable " + name);
      return;
    }
    const auto& sorts = it->second.sorts;
    if (sorts.size() != args.size()) {
      fail(where, name + " expects " + std::to_string(sorts.size()) + " arguments, got " +
                      std::to_string(args.size()));
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto s = term(args[i], where);
      if (s && *s != sorts[i])
        fail(where, "argument " + std::to_string(i + 1) + " of " + name + " should be " +
                        std::string(to_string(sorts[i])));
    }
  }
};

}  // namespace

std::optional<std::string> check_signature(const std::string& pred, const PredSignature& sig) {
  if (sig.kind == Kind::WF) {
    auto n = sig.sorts.size();
    if (n % 2 != 0) return "well-founded " + pred + " has odd arity";
    if (!std::equal(sig.sorts.begin(), sig.sorts.begin() + n / 2, sig.sorts.begin() + n / 2))
      return "well-founded " + pred + " has unequal halves";
  }
  if (sig.kind == Kind::FN && sig.sorts.empty()) return "functional " + pred + " needs an output position";
  return std::nullopt;
}

std::vector<SortError> check_well_sorted(const PfwCsp& problem) {
  std::vector<SortError> errors;
  for (const auto& [name, sig] : problem.kinding) {
    if (auto msg = check_signature(name, sig)) errors.push_back({0, name, *msg});
  }
  for (std::size_t i = 0; i < problem.clauses.size(); ++i) {
    const auto& c = problem.clauses[i];
    SortChecker sc{problem.kinding, i, errors, {}};
    for (const auto& a : c.positive) sc.pred(a.pred, a.args);
    for (const auto& a : c.negative) sc.pred(a.pred, a.args);
    for (const auto& f : c.head_theory) sc.formula(f);
    for (const auto& f : c.body_theory) sc.formula(f);
  }
  return errors;
}

// ---------------------------------------------------------------------------
// Variables

void collect_vars(const Term& t, VarSet& out) {
  switch (t.kind()) {
    case TermKind::Var: out.emplace(t.name(), t.sort()); return;
    case TermKind::IntLit:
    case TermKind::BoolLit: return;
    case TermKind::Neg:
    case TermKind::Scale: collect_vars(t.lhs(), out); return;
    case TermKind::Add:
    case TermKind::Sub:
      collect_vars(t.lhs(), out);
      collect_vars(t.rhs(), out);
      return;
  }
}

void collect_vars(const Formula& f, VarSet& out) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return;
    case FormulaKind::BoolVar: out.emplace(f.name(), Sort::Bool); return;
    case FormulaKind::Atom:
      collect_vars(f.lhs(), out);
      collect_vars(f.rhs(), out);
      return;
    case FormulaKind::PredApp:
      for (const auto& t : f.args()) collect_vars(t, out);
      return;
    default:
      for (const auto& c : f.children()) collect_vars(c, out);
  }
}

VarSet free_vars(const Formula& f) {
  VarSet s;
  collect_vars(f, s);
  return s;
}

VarSet free_vars(const Term& t) {
  VarSet s;
  collect_vars(t, s);
  return s;
}

void collect_preds(const Formula& f, std::vector<std::string>& out) {
  if (!f.has_pred_app()) return;
  if (f.kind() == FormulaKind::PredApp) {
    if (std::find(out.begin(), out.end(), f.name()) == out.end()) out.push_back(f.name());
    return;
  }
  for (const auto& c : f.children()) collect_preds(c, out);
}

// ---------------------------------------------------------------------------
// Substitution

Term substitute(const Term& t, const TermSubst& s) {
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = s.find(t.name());
      return it == s.end() ? t : it->second;
    }
    case TermKind::IntLit:
    case TermKind::BoolLit: return t;
    case TermKind::Neg: return Term::neg(substitute(t.lhs(), s));
    case TermKind::Scale: return Term::scale(t.value(), substitute(t.lhs(), s));
    case TermKind::Add: return Term::add(substitute(t.lhs(), s), substitute(t.rhs(), s));
    case TermKind::Sub: return Term::sub(substitute(t.lhs(), s), substitute(t.rhs(), s));
  }
  return t;
}

namespace {

Formula bool_term_to_formula(const Term& t) {
  if (t.kind() == TermKind::BoolLit) return Formula::constant(t.bool_value());
  if (t.kind() == TermKind::Var) return Formula::bool_var(t.name());
  throw Error("non-Boolean term substituted for a Boolean variable");
}

std::vector<Formula> map_children(const Formula& f, const std::function<Formula(const Formula&)>& fn) {
  std::vector<Formula> out;
  out.reserve(f.children().size());
  for (const auto& c : f.children()) out.push_back(fn(c));
  return out;
}

}  // namespace

Formula substitute(const Formula& f, const TermSubst& s) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::BoolVar: {
      auto it = s.find(f.name());
      return it == s.end() ? f : bool_term_to_formula(it->second);
    }
    case FormulaKind::Atom: return Formula::atom(f.rel(), substitute(f.lhs(), s), substitute(f.rhs(), s));
    case FormulaKind::PredApp: {
      std::vector<Term> args;
      for (const auto& t : f.args()) args.push_back(substitute(t, s));
      return Formula::pred(f.name(), std::move(args));
    }
    case FormulaKind::Not: return Formula::lnot(substitute(f.operand(), s));
    case FormulaKind::And: return Formula::land(map_children(f, [&](const Formula& c) { return substitute(c, s); }));
    case FormulaKind::Or: return Formula::lor(map_children(f, [&](const Formula& c) { return substitute(c, s); }));
  }
  return f;
}

PredAtom substitute(const PredAtom& a, const TermSubst& s) {
  PredAtom r{a.pred, {}};
  for (const auto& t : a.args) r.args.push_back(substitute(t, s));
  return r;
}

Clause substitute(const Clause& c, const TermSubst& s) {
  Clause r;
  for (const auto& a : c.positive) r.positive.push_back(substitute(a, s));
  for (const auto& a : c.negative) r.negative.push_back(substitute(a, s));
  for (const auto& f : c.head_theory) r.head_theory.push_back(substitute(f, s));
  for (const auto& f : c.body_theory) r.body_theory.push_back(substitute(f, s));
  return r;
}

namespace {

Term rename_term(const Term& t, const std::function<std::string(const std::string&)>& rn) {
  switch (t.kind()) {
    case TermKind::Var: return Term::var(rn(t.name()), t.sort());
    case TermKind::IntLit:
    case TermKind::BoolLit: return t;
    case TermKind::Neg: return Term::neg(rename_term(t.lhs(), rn));
    case TermKind::Scale: return Term::scale(t.value(), rename_term(t.lhs(), rn));
    case TermKind::Add: return Term::add(rename_term(t.lhs(), rn), rename_term(t.rhs(), rn));
    case TermKind::Sub: return Term::sub(rename_term(t.lhs(), rn), rename_term(t.rhs(), rn));
  }
  return t;
}

}  // namespace

Formula rename_vars(const Formula& f, const std::function<std::string(const std::string&)>& rn) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::BoolVar: return Formula::bool_var(rn(f.name()));
    case FormulaKind::Atom: return Formula::atom(f.rel(), rename_term(f.lhs(), rn), rename_term(f.rhs(), rn));
    case FormulaKind::PredApp: {
      std::vector<Term> args;
      for (const auto& t : f.args()) args.push_back(rename_term(t, rn));
      return Formula::pred(f.name(), std::move(args));
    }
    case FormulaKind::Not: return Formula::lnot(rename_vars(f.operand(), rn));
    case FormulaKind::And: return Formula::land(map_children(f, [&](const Formula& c) { return rename_vars(c, rn); }));
    case FormulaKind::Or: return Formula::lor(map_children(f, [&](const Formula& c) { return rename_vars(c, rn); }));
  }
  return f;
}

Clause rename_vars(const Clause& c, const std::function<std::string(const std::string&)>& rn) {
  auto atom = [&](const PredAtom& a) {
    PredAtom r{a.pred, {}};
    for (const auto& t : a.args) r.args.push_back(rename_term(t, rn));
    return r;
  };
  Clause r;
  for (const auto& a : c.positive) r.positive.push_back(atom(a));
  for (const auto& a : c.negative) r.negative.push_back(atom(a));
  for (const auto& f : c.head_theory) r.head_theory.push_back(rename_vars(f, rn));
  for (const auto& f : c.body_theory) r.body_theory.push_back(rename_vars(f, rn));
  return r;
}

Formula apply_definition(const PredicateDefinition& def, const std::vector<Term>& args) {
  if (def.params.size() != args.size()) throw Error("definition arity does not match application");
  TermSubst s;
  for (std::size_t i = 0; i < args.size(); ++i) s.emplace(def.params[i].first, args[i]);
  return substitute(def.body, s);
}

Formula substitute_predicates(const Formula& f, const Candidate& sigma) {
  if (!f.has_pred_app()) return f;
  switch (f.kind()) {
    case FormulaKind::PredApp: {
      auto it = sigma.find(f.name());
      if (it == sigma.end()) throw MissingDefinition(f.name());
      return apply_definition(it->second, f.args());
    }
    case FormulaKind::Not: return Formula::lnot(substitute_predicates(f.operand(), sigma));
    case FormulaKind::And:
      return Formula::land(map_children(f, [&](const Formula& c) { return substitute_predicates(c, sigma); }));
    case FormulaKind::Or:
      return Formula::lor(map_children(f, [&](const Formula& c) { return substitute_predicates(c, sigma); }));
    default: return f;
  }
}

Formula substitute_predicates(const Clause& c, const Candidate& sigma) {
  std::vector<Formula> ds;
  if (!c.body_theory.empty()) ds.push_back(Formula::lnot(Formula::land(c.body_theory)));
  for (const auto& a : c.negative) ds.push_back(Formula::lnot(substitute_predicates(a.to_formula(), sigma)));
  for (const auto& a : c.positive) ds.push_back(substitute_predicates(a.to_formula(), sigma));
  for (const auto& h : c.head_theory) ds.push_back(h);
  return Formula::lor(std::move(ds));
}

std::vector<Formula> substitute_predicates(const std::vector<Clause>& clauses, const Candidate& sigma) {
  std::vector<Formula> out;
  out.reserve(clauses.size());
  for (const auto& c : clauses) out.push_back(substitute_predicates(c, sigma));
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation and grounding

Value eval(const Term& t, const Assignment& a) {
  switch (t.kind()) {
    case TermKind::Var: {
      auto it = a.find(t.name());
      if (it == a.end()) throw IncompleteSubstitution(t.name());
      return it->second;
    }
    case TermKind::IntLit: return Value::of_int(t.value());
    case TermKind::BoolLit: return Value::of_bool(t.bool_value());
    case TermKind::Neg: return Value::of_int(-eval(t.lhs(), a).as_int());
    case TermKind::Scale: return Value::of_int(t.value() * eval(t.lhs(), a).as_int());
    case TermKind::Add: return Value::of_int(eval(t.lhs(), a).as_int() + eval(t.rhs(), a).as_int());
    case TermKind::Sub: return Value::of_int(eval(t.lhs(), a).as_int() - eval(t.rhs(), a).as_int());
  }
  throw Error("bad term");
}

namespace {

bool compare(Rel rel, const Value& x, const Value& y) {
  if (x.sort() == Sort::Bool || y.sort() == Sort::Bool) {
    if (rel == Rel::Eq) return x == y;
    if (rel == Rel::Ne) return x != y;
    throw Error("ordering on Boolean values");
  }
  const Integer& a = x.as_int();
  const Integer& b = y.as_int();
  switch (rel) {
    case Rel::Eq: return a == b;
    case Rel::Ne: return a != b;
    case Rel::Le: return a <= b;
    case Rel::Lt: return a < b;
    case Rel::Ge: return a >= b;
    case Rel::Gt: return a > b;
  }
  return false;
}

}  // namespace

bool eval(const Formula& f, const Assignment& a) {
  switch (f.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::BoolVar: {
      auto it = a.find(f.name());
      if (it == a.end()) throw IncompleteSubstitution(f.name());
      return it->second.as_bool();
    }
    case FormulaKind::Atom: return compare(f.rel(), eval(f.lhs(), a), eval(f.rhs(), a));
    case FormulaKind::PredApp: throw Error("cannot evaluate predicate application " + f.name());
    case FormulaKind::Not: return !eval(f.operand(), a);
    case FormulaKind::And:
      return std::all_of(f.children().begin(), f.children().end(), [&](const Formula& c) { return eval(c, a); });
    case FormulaKind::Or:
      return std::any_of(f.children().begin(), f.children().end(), [&](const Formula& c) { return eval(c, a); });
  }
  return false;
}

ExampleInstance ground(const Clause& c, const Assignment& theta) {
  for (const auto& [name, sort] : c.free_vars()) {
    auto it = theta.find(name);
    if (it == theta.end()) throw IncompleteSubstitution(name);
    if (it->second.sort() != sort) throw Error("value for " + name + " has the wrong sort");
  }
  ExampleInstance e;
  if (eval(c.theory_part(), theta)) {
    e.trivially_true = true;
    return e;
  }
  auto g = [&](const PredAtom& a) {
    GroundAtom ga{a.pred, {}};
    for (const auto& t : a.args) ga.args.push_back(eval(t, theta));
    return ga;
  };
  for (const auto& a : c.positive) e.positive.push_back(g(a));
  for (const auto& a : c.negative) e.negative.push_back(g(a));
  return e.canonical();
}

// ---------------------------------------------------------------------------
// Linear forms

LinearExpr linearize(const Term& t) {
  LinearExpr e;
  std::function<void(const Term&, const Integer&)> go = [&](const Term& u, const Integer& k) {
    switch (u.kind()) {
      case TermKind::Var: e.coeffs[u.name()] += k; break;
      case TermKind::IntLit: e.constant += k * u.value(); break;
      case TermKind::BoolLit: throw Error("Boolean literal in arithmetic");
      case TermKind::Neg: go(u.lhs(), -k); break;
      case TermKind::Scale: go(u.lhs(), k * u.value()); break;
      case TermKind::Add:
        go(u.lhs(), k);
        go(u.rhs(), k);
        break;
      case TermKind::Sub:
        go(u.lhs(), k);
        go(u.rhs(), -k);
        break;
    }
  };
  go(t, 1);
  for (auto it = e.coeffs.begin(); it != e.coeffs.end();) {
    if (it->second == 0) it = e.coeffs.erase(it);
    else ++it;
  }
  return e;
}

Term to_term(const LinearExpr& e) {
  std::optional<Term> acc;
  for (const auto& [name, k] : e.coeffs) {
    Term v = Term::var(name);
    Integer mag = abs(k);
    Term piece = mag == 1 ? v : Term::scale(mag, v);
    if (!acc) acc = k < 0 ? Term::neg(piece) : piece;
    else acc = k < 0 ? Term::sub(*acc, piece) : Term::add(*acc, piece);
  }
  if (!acc) return Term::int_lit(e.constant);
  if (e.constant > 0) return Term::add(*acc, Term::int_lit(e.constant));
  if (e.constant < 0) return Term::sub(*acc, Term::int_lit(-e.constant));
  return *acc;
}

// ---------------------------------------------------------------------------
// Simplification

Term simplify(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::IntLit:
    case TermKind::BoolLit: return t;
    case TermKind::Neg: {
      Term a = simplify(t.lhs());
      if (a.kind() == TermKind::IntLit) return Term::int_lit(-a.value());
      if (a.kind() == TermKind::Neg) return a.lhs();
      return Term::neg(a);
    }
    case TermKind::Scale: {
      Term a = simplify(t.lhs());
      if (t.value() == 0) return Term::int_lit(0);
      if (t.value() == 1) return a;
      if (a.kind() == TermKind::IntLit) return Term::int_lit(t.value() * a.value());
      if (t.value() == -1) return Term::neg(a);
      return Term::scale(t.value(), a);
    }
    case TermKind::Add:
    case TermKind::Sub: {
      Term a = simplify(t.lhs());
      Term b = simplify(t.rhs());
      bool add = t.kind() == TermKind::Add;
      if (a.kind() == TermKind::IntLit && b.kind() == TermKind::IntLit)
        return Term::int_lit(add ? Integer(a.value() + b.value()) : Integer(a.value() - b.value()));
      if (b.kind() == TermKind::IntLit && b.value() == 0) return a;
      if (a.kind() == TermKind::IntLit && a.value() == 0) return add ? b : simplify(Term::neg(b));
      return add ? Term::add(a, b) : Term::sub(a, b);
    }
  }
  return t;
}

namespace {

std::optional<bool> fold_atom(const Formula& f) {
  if (f.lhs().sort() == Sort::Bool || f.rhs().sort() == Sort::Bool) {
    if (f.lhs().kind() == TermKind::BoolLit && f.rhs().kind() == TermKind::BoolLit)
      return compare(f.rel(), Value::of_bool(f.lhs().bool_value()), Value::of_bool(f.rhs().bool_value()));
    if (f.lhs() == f.rhs()) return f.rel() == Rel::Eq;
    return std::nullopt;
  }
  LinearExpr d = linearize(Term::sub(f.lhs(), f.rhs()));
  if (!d.coeffs.empty()) return std::nullopt;
  return compare(f.rel(), Value::of_int(d.constant), Value::of_int(0));
}

}  // namespace

Formula simplify(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::BoolVar: return f;
    case FormulaKind::Atom: {
      Formula a = Formula::atom(f.rel(), simplify(f.lhs()), simplify(f.rhs()));
      if (auto v = fold_atom(a)) return Formula::constant(*v);
      // b = true  ~>  b
      if (a.rel() == Rel::Eq || a.rel() == Rel::Ne) {
        const Term *var = nullptr, *lit = nullptr;
        if (a.lhs().kind() == TermKind::Var && a.rhs().kind() == TermKind::BoolLit) var = &a.lhs(), lit = &a.rhs();
        if (a.rhs().kind() == TermKind::Var && a.lhs().kind() == TermKind::BoolLit) var = &a.rhs(), lit = &a.lhs();
        if (var) {
          bool positive = lit->bool_value() == (a.rel() == Rel::Eq);
          Formula b = Formula::bool_var(var->name());
          return positive ? b : Formula::lnot(b);
        }
      }
      return a;
    }
    case FormulaKind::PredApp: {
      std::vector<Term> args;
      for (const auto& t : f.args()) args.push_back(simplify(t));
      return Formula::pred(f.name(), std::move(args));
    }
    case FormulaKind::Not: {
      Formula a = simplify(f.operand());
      if (a.is_true()) return Formula::bottom();
      if (a.is_false()) return Formula::top();
      if (a.kind() == FormulaKind::Not) return a.operand();
      if (a.kind() == FormulaKind::Atom) return Formula::atom(negate(a.rel()), a.lhs(), a.rhs());
      return Formula::lnot(a);
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      bool is_and = f.kind() == FormulaKind::And;
      std::vector<Formula> out;
      for (const auto& c : f.children()) {
        Formula s = simplify(c);
        if (s.is_true() == is_and && (s.is_true() || s.is_false())) continue;  // unit
        if ((is_and && s.is_false()) || (!is_and && s.is_true())) return s;    // absorbing
        if (s.kind() == f.kind()) {
          for (const auto& g : s.children())
            if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
        } else if (std::find(out.begin(), out.end(), s) == out.end()) {
          out.push_back(s);
        }
      }
      return is_and ? Formula::land(std::move(out)) : Formula::lor(std::move(out));
    }
  }
  return f;
}

Formula nnf(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::And: return Formula::land(map_children(f, nnf));
    case FormulaKind::Or: return Formula::lor(map_children(f, nnf));
    case FormulaKind::Not: {
      const Formula& a = f.operand();
      switch (a.kind()) {
        case FormulaKind::True: return Formula::bottom();
        case FormulaKind::False: return Formula::top();
        case FormulaKind::Atom: return Formula::atom(negate(a.rel()), a.lhs(), a.rhs());
        case FormulaKind::Not: return nnf(a.operand());
        case FormulaKind::And:
          return Formula::lor(map_children(a, [](const Formula& c) { return nnf(Formula::lnot(c)); }));
        case FormulaKind::Or:
          return Formula::land(map_children(a, [](const Formula& c) { return nnf(Formula::lnot(c)); }));
        default: return f;
      }
    }
    default: return f;
  }
}

std::vector<Formula> conjuncts(const Formula& f) {
  if (f.kind() != FormulaKind::And) return f.is_true() ? std::vector<Formula>{} : std::vector<Formula>{f};
  std::vector<Formula> out;
  for (const auto& c : f.children()) {
    auto sub = conjuncts(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::vector<Formula> disjuncts(const Formula& f) {
  if (f.kind() != FormulaKind::Or) return f.is_false() ? std::vector<Formula>{} : std::vector<Formula>{f};
  std::vector<Formula> out;
  for (const auto& c : f.children()) {
    auto sub = disjuncts(c);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

}  // namespace pfw
