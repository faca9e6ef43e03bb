#include "pfw/printer.hpp"

#include "pfw/ir_ops.hpp"

namespace pfw {

namespace {

// precedence: 0 sum, 1 product/unary, 2 atomic
int term_prec(const Term& t) {
  switch (t.kind()) {
    case TermKind::Add:
    case TermKind::Sub: return 0;
    case TermKind::Neg:
    case TermKind::Scale: return 1;
    case TermKind::IntLit: return t.value() < 0 ? 1 : 2;
    default: return 2;
  }
}

std::string paren_term(const Term& t, int min_prec) {
  std::string s = to_text(t);
  return term_prec(t) < min_prec ? "(" + s + ")" : s;
}

// 0 implies, 1 or, 2 and, 3 not/atom
int formula_prec(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Or: return 1;
    case FormulaKind::And: return 2;
    default: return 3;
  }
}

std::string paren_formula(const Formula& f, int min_prec) {
  std::string s = to_text(f);
  return formula_prec(f) < min_prec ? "(" + s + ")" : s;
}

std::string arg_text(const Term& t) {
  if (t.kind() == TermKind::Var && t.sort() == Sort::Bool) return t.name() + " : bool";
  return to_text(t);
}

std::string atom_text(const std::string& pred, const std::vector<Term>& args) {
  std::string s = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += arg_text(args[i]);
  }
  return s + ")";
}

std::string sort_list(const std::vector<Sort>& sorts) {
  std::string s;
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    if (i) s += ", ";
    s += to_string(sorts[i]);
  }
  return s;
}

}  // namespace

std::string to_text(const Term& t) {
  switch (t.kind()) {
    case TermKind::Var: return t.name();
    case TermKind::IntLit: return t.value().get_str();
    case TermKind::BoolLit: return t.bool_value() ? "true" : "false";
    case TermKind::Neg: return "-" + paren_term(t.lhs(), 2);
    case TermKind::Scale: return t.value().get_str() + " * " + paren_term(t.lhs(), 2);
    case TermKind::Add: return to_text(t.lhs()) + " + " + paren_term(t.rhs(), 1);
    case TermKind::Sub: return to_text(t.lhs()) + " - " + paren_term(t.rhs(), 1);
  }
  return "?";
}

std::string to_text(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::BoolVar: return f.name();
    case FormulaKind::Atom:
      return to_text(f.lhs()) + " " + std::string(to_string(f.rel())) + " " + to_text(f.rhs());
    case FormulaKind::PredApp: return atom_text(f.name(), f.args());
    case FormulaKind::Not: return "!" + paren_formula(f.operand(), 3);
    case FormulaKind::And:
    case FormulaKind::Or: {
      bool is_and = f.kind() == FormulaKind::And;
      std::string s;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) s += is_and ? " and " : " or ";
        s += paren_formula(f.children()[i], is_and ? 3 : 2);
      }
      return s;
    }
  }
  return "?";
}

std::string to_text(const Clause& c) {
  std::vector<std::string> heads, body;
  for (const auto& a : c.positive) heads.push_back(atom_text(a.pred, a.args));
  for (const auto& h : c.head_theory) heads.push_back(h.is_true() ? "top" : paren_formula(h, 1));
  for (const auto& a : c.negative) body.push_back(atom_text(a.pred, a.args));
  for (const auto& b : c.body_theory) body.push_back(paren_formula(b, 1));
  std::string s;
  if (heads.empty()) s = "bot";
  for (std::size_t i = 0; i < heads.size(); ++i) s += (i ? ",\n" : "") + heads[i];
  if (!body.empty()) {
    s += " :-";
    for (std::size_t i = 0; i < body.size(); ++i) s += (i ? ",\n  " : "\n  ") + body[i];
  }
  return s + ".";
}

std::string print_pfwcsp(const PfwCsp& problem) {
  std::string s;
  for (const auto& [name, sig] : problem.kinding)
    s += std::string(to_string(sig.kind)) + " " + name + "(" + sort_list(sig.sorts) + ").\n";
  if (!problem.kinding.empty()) s += "\n";
  for (const auto& c : problem.clauses) s += to_text(c) + "\n\n";
  return s;
}

std::string print_candidate(const Candidate& sigma) {
  std::string s;
  for (const auto& [name, def] : sigma) {
    std::vector<Term> params;
    for (const auto& [p, sort] : def.params) params.push_back(Term::var(p, sort));
    s += atom_text(name, params) + " :=\n  " + to_text(def.body) + ".\n";
  }
  return s;
}

}  // namespace pfw
