#include "pfw/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>

#include "pfw/ir_ops.hpp"

namespace pfw {

std::string Diagnostic::to_string() const {
  return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
}

namespace {

std::string join_diags(const std::vector<Diagnostic>& ds) {
  std::string s;
  for (const auto& d : ds) {
    if (!s.empty()) s += "\n";
    s += d.to_string();
  }
  return s.empty() ? "parse error" : s;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diags) : Error(join_diags(diags)), diags_(std::move(diags)) {}

Kind default_kind(const std::string& pred) {
  if (pred.rfind("WF_", 0) == 0) return Kind::WF;
  if (pred.rfind("FN_", 0) == 0) return Kind::FN;
  return Kind::Ord;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
  Ident, Int, LParen, RParen, Comma, Dot, ColonDash, ColonEq, Colon,
  Eq, Ne, Le, Lt, Ge, Gt, Plus, Minus, Star, Bang, Implies, AndAnd, OrOr, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

struct Failure {
  Diagnostic diag;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') ++line, col = 1;
      else ++col;
    }
  };
  auto here = [&] { return SourceSpan{i, i, line, col}; };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '(' && i + 1 < src.size() && src[i + 1] == '*') {
      SourceSpan open = here();
      int depth = 0;
      while (i < src.size()) {
        if (src.compare(i, 2, "(*") == 0) ++depth, advance(2);
        else if (src.compare(i, 2, "*)") == 0) {
          advance(2);
          if (--depth == 0) break;
        } else advance(1);
      }
      if (depth != 0) throw Failure{{open, "unterminated comment"}};
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span = here();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      while (j < src.size() && src[j] == '\'') ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static const std::pair<const char*, Tok> ops[] = {
          {":-", Tok::ColonDash}, {":=", Tok::ColonEq}, {"<>", Tok::Ne}, {"!=", Tok::Ne},  {"<=", Tok::Le},
          {">=", Tok::Ge},        {"=>", Tok::Implies}, {"==", Tok::Eq}, {"&&", Tok::AndAnd}, {"||", Tok::OrOr},
          {"(", Tok::LParen},     {")", Tok::RParen},   {",", Tok::Comma}, {".", Tok::Dot},   {":", Tok::Colon},
          {"=", Tok::Eq},         {"<", Tok::Lt},       {">", Tok::Gt},  {"+", Tok::Plus},   {"-", Tok::Minus},
          {"*", Tok::Star},       {"!", Tok::Bang},
      };
      bool matched = false;
      for (const auto& [text, kind] : ops) {
        std::size_t n = std::char_traits<char>::length(text);
        if (src.compare(i, n, text) == 0) {
          t.kind = kind;
          t.text = text;
          advance(n);
          matched = true;
          break;
        }
      }
      if (!matched) throw Failure{{t.span, std::string("unexpected character '") + c + "'"}};
    }
    t.span.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::End;
  end.span = here();
  out.push_back(end);
  return out;
}

bool is_keyword(const std::string& s) {
  static const char* kws[] = {"and", "or", "not", "top", "bot", "true", "false"};
  return std::any_of(std::begin(kws), std::end(kws), [&](const char* k) { return s == k; });
}

// ---------------------------------------------------------------------------
// Sort inference over clause-scoped variables and predicate positions

class SortUnifier {
 public:
  int key(const std::string& k) {
    auto [it, fresh] = ids_.emplace(k, static_cast<int>(parent_.size()));
    if (fresh) {
      parent_.push_back(it->second);
      sort_.push_back(std::nullopt);
    }
    return it->second;
  }

  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  // false on conflict
  bool set(int x, Sort s) {
    x = find(x);
    if (sort_[x] && *sort_[x] != s) return false;
    sort_[x] = s;
    return true;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return true;
    if (sort_[a] && sort_[b] && *sort_[a] != *sort_[b]) return false;
    if (!sort_[b]) sort_[b] = sort_[a];
    parent_[a] = b;
    return true;
  }

  Sort get(const std::string& k) {
    auto it = ids_.find(k);
    if (it == ids_.end()) return Sort::Int;
    auto s = sort_[find(it->second)];
    return s ? *s : Sort::Int;
  }

 private:
  std::map<std::string, int> ids_;
  std::vector<int> parent_;
  std::vector<std::optional<Sort>> sort_;
};

std::string var_key(int scope, const std::string& name) { return "v" + std::to_string(scope) + ":" + name; }
std::string pos_key(const std::string& pred, std::size_t i) { return "p:" + pred + ":" + std::to_string(i); }

struct SortWalker {
  SortUnifier& u;
  std::vector<Diagnostic>& diags;
  SourceSpan span;
  int scope;

  void conflict(const std::string& what) { diags.push_back({span, "sort conflict on " + what}); }

  void set_var(const std::string& name, Sort s) {
    if (!u.set(u.key(var_key(scope, name)), s)) conflict("variable " + name);
  }

  void int_term(const Term& t) {
    switch (t.kind()) {
      case TermKind::Var: set_var(t.name(), Sort::Int); break;
      case TermKind::BoolLit: diags.push_back({span, "Boolean literal in arithmetic"}); break;
      case TermKind::IntLit: break;
      case TermKind::Neg:
      case TermKind::Scale: int_term(t.lhs()); break;
      case TermKind::Add:
      case TermKind::Sub:
        int_term(t.lhs());
        int_term(t.rhs());
        break;
    }
  }

  void formula(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False: return;
      case FormulaKind::BoolVar: set_var(f.name(), Sort::Bool); return;
      case FormulaKind::Atom: {
        if (f.rel() != Rel::Eq && f.rel() != Rel::Ne) {
          int_term(f.lhs());
          int_term(f.rhs());
          return;
        }
        auto side = [&](const Term& t) -> std::pair<std::optional<int>, std::optional<Sort>> {
          if (t.kind() == TermKind::Var) return {u.key(var_key(scope, t.name())), std::nullopt};
          if (t.kind() == TermKind::BoolLit) return {std::nullopt, Sort::Bool};
          int_term(t);
          return {std::nullopt, Sort::Int};
        };
        auto [ka, sa] = side(f.lhs());
        auto [kb, sb] = side(f.rhs());
        if (ka && kb) {
          if (!u.unite(*ka, *kb)) conflict(f.lhs().name() + " = " + f.rhs().name());
        } else if (ka && sb) {
          if (!u.set(*ka, *sb)) conflict("variable " + f.lhs().name());
        } else if (kb && sa) {
          if (!u.set(*kb, *sa)) conflict("variable " + f.rhs().name());
        } else if (sa && sb && *sa != *sb) {
          conflict("comparison");
        }
        return;
      }
      case FormulaKind::PredApp:
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          const Term& a = f.args()[i];
          int pk = u.key(pos_key(f.name(), i));
          bool ok = true;
          if (a.kind() == TermKind::Var) ok = u.unite(u.key(var_key(scope, a.name())), pk);
          else if (a.kind() == TermKind::BoolLit) ok = u.set(pk, Sort::Bool);
          else {
            int_term(a);
            ok = u.set(pk, Sort::Int);
          }
          if (!ok) conflict("argument " + std::to_string(i + 1) + " of " + f.name());
        }
        return;
      default:
        for (const auto& c : f.children()) formula(c);
    }
  }
};

Term resort(const Term& t, const std::function<Sort(const std::string&)>& sort_of) {
  switch (t.kind()) {
    case TermKind::Var: return Term::var(t.name(), sort_of(t.name()));
    case TermKind::IntLit:
    case TermKind::BoolLit: return t;
    case TermKind::Neg: return Term::neg(resort(t.lhs(), sort_of));
    case TermKind::Scale: return Term::scale(t.value(), resort(t.lhs(), sort_of));
    case TermKind::Add: return Term::add(resort(t.lhs(), sort_of), resort(t.rhs(), sort_of));
    case TermKind::Sub: return Term::sub(resort(t.lhs(), sort_of), resort(t.rhs(), sort_of));
  }
  return t;
}

Formula resort(const Formula& f, const std::function<Sort(const std::string&)>& sort_of) {
  switch (f.kind()) {
    case FormulaKind::Atom: return Formula::atom(f.rel(), resort(f.lhs(), sort_of), resort(f.rhs(), sort_of));
    case FormulaKind::PredApp: {
      std::vector<Term> args;
      for (const auto& a : f.args()) args.push_back(resort(a, sort_of));
      return Formula::pred(f.name(), std::move(args));
    }
    case FormulaKind::Not: return Formula::lnot(resort(f.operand(), sort_of));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> cs;
      for (const auto& c : f.children()) cs.push_back(resort(c, sort_of));
      return f.kind() == FormulaKind::And ? Formula::land(std::move(cs)) : Formula::lor(std::move(cs));
    }
    default: return f;
  }
}

// ---------------------------------------------------------------------------
// Clause normalization: split predicate applications out of Boolean structure

struct Lit {
  bool neg;
  Formula f;  // PredApp or predicate-free
};
using LitClause = std::vector<Lit>;

std::vector<LitClause> product(const std::vector<std::vector<LitClause>>& parts) {
  std::vector<LitClause> acc{LitClause{}};
  for (const auto& part : parts) {
    std::vector<LitClause> next;
    for (const auto& a : acc)
      for (const auto& b : part) {
        LitClause c = a;
        c.insert(c.end(), b.begin(), b.end());
        next.push_back(std::move(c));
      }
    acc = std::move(next);
  }
  return acc;
}

// CNF of f (positive) or of !f (negative), treating predicate-free
// subformulas as opaque literals.
std::vector<LitClause> cnf(const Formula& f, bool positive) {
  if (!f.has_pred_app()) return {LitClause{Lit{!positive, f}}};
  switch (f.kind()) {
    case FormulaKind::PredApp: return {LitClause{Lit{!positive, f}}};
    case FormulaKind::Not: return cnf(f.operand(), !positive);
    case FormulaKind::And:
    case FormulaKind::Or: {
      bool conj = (f.kind() == FormulaKind::And) == positive;
      std::vector<std::vector<LitClause>> parts;
      for (const auto& c : f.children()) parts.push_back(cnf(c, positive));
      if (conj) {
        std::vector<LitClause> out;
        for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
        return out;
      }
      return product(parts);
    }
    default: return {LitClause{Lit{!positive, f}}};
  }
}

std::vector<Clause> normalize_clause(const std::vector<Formula>& heads, const std::vector<Formula>& body) {
  std::vector<std::vector<LitClause>> parts;
  for (const auto& h : heads) parts.push_back(cnf(h, true));
  for (const auto& b : body) parts.push_back(cnf(b, false));
  std::vector<Clause> out;
  for (const auto& lits : product(parts)) {
    Clause c;
    for (const auto& l : lits) {
      if (l.f.kind() == FormulaKind::PredApp) {
        PredAtom a{l.f.name(), l.f.args()};
        (l.neg ? c.negative : c.positive).push_back(std::move(a));
      } else {
        (l.neg ? c.body_theory : c.head_theory).push_back(l.f);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

struct Annotation {
  int scope;
  std::string name;
  Sort sort;
  SourceSpan span;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* text) const { return at(Tok::Ident) && peek().text == text; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw Failure{{peek().span, msg}}; }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what + (at(Tok::End) ? " at end of input" : " before '" + peek().text + "'"));
    return next();
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  std::string ident(const char* what) {
    if (!at(Tok::Ident) || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return next().text;
  }

  // skip to just past the next '.', for error recovery
  void recover() {
    while (!at(Tok::End) && !at(Tok::Dot)) next();
    accept(Tok::Dot);
  }

  // -- terms ---------------------------------------------------------------

  Term term() {
    Term t = product_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      bool plus = next().kind == Tok::Plus;
      Term r = product_term();
      t = plus ? Term::add(t, r) : Term::sub(t, r);
    }
    return t;
  }

  static std::optional<Integer> constant_of(const Term& t) {
    if (!free_vars(t).empty()) return std::nullopt;
    try {
      return linearize(t).constant;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  Term product_term() {
    Term t = unary_term();
    while (at(Tok::Star)) {
      next();
      Term r = unary_term();
      if (auto k = constant_of(t)) t = Term::scale(*k, r);
      else if (auto k2 = constant_of(r)) t = Term::scale(*k2, t);
      else fail("nonlinear multiplication");
    }
    return t;
  }

  Term unary_term() {
    if (accept(Tok::Minus)) {
      Term t = unary_term();
      if (t.kind() == TermKind::IntLit) return Term::int_lit(-t.value());
      return Term::neg(t);
    }
    if (at(Tok::Int)) return Term::int_lit(Integer(next().text));
    if (at_ident("true") || at_ident("false")) return Term::bool_lit(next().text == "true");
    if (at(Tok::Ident) && !is_keyword(peek().text) && peek(1).kind != Tok::LParen) return Term::var(next().text);
    if (accept(Tok::LParen)) {
      Term t = term();
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("expected a term");
  }

  // -- formulas ------------------------------------------------------------

  Formula formula() {
    Formula f = disjunction();
    if (accept(Tok::Implies)) return Formula::implies(f, formula());
    return f;
  }

  Formula disjunction() {
    std::vector<Formula> ds{conjunction()};
    while (at_ident("or") || at(Tok::OrOr)) {
      next();
      ds.push_back(conjunction());
    }
    return Formula::lor(std::move(ds));
  }

  Formula conjunction() {
    std::vector<Formula> cs{negation()};
    while (at_ident("and") || at(Tok::AndAnd)) {
      next();
      cs.push_back(negation());
    }
    return Formula::land(std::move(cs));
  }

  Formula negation() {
    if (at(Tok::Bang) || at_ident("not")) {
      next();
      return Formula::lnot(negation());
    }
    return primary();
  }

  static std::optional<Rel> rel_of(Tok k) {
    switch (k) {
      case Tok::Eq: return Rel::Eq;
      case Tok::Ne: return Rel::Ne;
      case Tok::Le: return Rel::Le;
      case Tok::Lt: return Rel::Lt;
      case Tok::Ge: return Rel::Ge;
      case Tok::Gt: return Rel::Gt;
      default: return std::nullopt;
    }
  }

  Formula primary() {
    std::size_t save = pos_;
    try {
      Term lhs = term();
      if (auto rel = rel_of(peek().kind)) {
        next();
        return Formula::atom(*rel, lhs, term());
      }
    } catch (const Failure&) {
      if (pos_ > save && rel_of(toks_[pos_ - 1].kind)) throw;  // committed to a comparison
    }
    pos_ = save;
    if (at_ident("top") || at_ident("true")) return next(), Formula::top();
    if (at_ident("bot") || at_ident("false")) return next(), Formula::bottom();
    if (accept(Tok::LParen)) {
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    std::string name = ident("a formula");
    if (at(Tok::LParen)) return pred_app(name);
    return Formula::bool_var(name);
  }

  Formula pred_app(const std::string& name) {
    SourceSpan span = toks_[pos_ - 1].span;
    expect(Tok::LParen, "'('");
    std::vector<Term> args;
    if (!at(Tok::RParen)) {
      do {
        Term a = term();
        if (accept(Tok::Colon)) {
          Sort s = sort_name();
          if (a.kind() != TermKind::Var) fail("sort annotation on a non-variable argument");
          annotations.push_back({scope, a.name(), s, span});
        }
        args.push_back(a);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    auto [it, fresh] = arities.emplace(name, args.size());
    if (!fresh && it->second != args.size())
      throw Failure{{span, name + " used with " + std::to_string(args.size()) + " and " +
                               std::to_string(it->second) + " arguments"}};
    return Formula::pred(name, std::move(args));
  }

  Sort sort_name() {
    if (at_ident("bool")) return next(), Sort::Bool;
    if (at_ident("int")) return next(), Sort::Int;
    fail("expected 'int' or 'bool'");
  }

  VarList var_list() {
    VarList vs;
    do {
      std::string n = ident("a variable name");
      Sort s = Sort::Int;
      if (accept(Tok::Colon)) s = sort_name();
      vs.emplace_back(n, s);
    } while (accept(Tok::Comma));
    return vs;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int scope = 0;
  std::vector<Annotation> annotations;
  std::map<std::string, std::size_t> arities;
};

struct RawClause {
  std::vector<Formula> heads, body;
  SourceSpan span;
  int scope;
};

struct Decl {
  Kind kind;
  std::string name;
  std::vector<Sort> sorts;
  SourceSpan span;
};

void seed_annotations(SortUnifier& u, const std::vector<Annotation>& anns, std::vector<Diagnostic>& diags) {
  for (const auto& a : anns)
    if (!u.set(u.key(var_key(a.scope, a.name)), a.sort)) diags.push_back({a.span, "sort conflict on variable " + a.name});
}

}  // namespace

std::vector<Clause> make_clauses(const std::vector<Formula>& heads, const std::vector<Formula>& body) {
  return normalize_clause(heads, body);
}

PfwCsp parse_pfwcsp(std::string_view text) {
  std::vector<Diagnostic> diags;
  std::optional<Parser> p;
  try {
    p.emplace(text);
  } catch (const Failure& f) {
    throw ParseError({f.diag});
  }
  std::vector<RawClause> raws;
  std::vector<Decl> decls;
  while (!p->at(Tok::End)) {
    SourceSpan start = p->peek().span;
    try {
      if (p->at(Tok::Ident) && (p->peek().text == "ord" || p->peek().text == "wf" || p->peek().text == "fn") &&
          p->peek(1).kind == Tok::Ident && p->peek(2).kind == Tok::LParen) {
        std::string k = p->next().text;
        Decl d{k == "wf" ? Kind::WF : k == "fn" ? Kind::FN : Kind::Ord, p->next().text, {}, start};
        p->expect(Tok::LParen, "'('");
        if (!p->at(Tok::RParen)) {
          do d.sorts.push_back(p->sort_name());
          while (p->accept(Tok::Comma));
        }
        p->expect(Tok::RParen, "')'");
        p->expect(Tok::Dot, "'.'");
        decls.push_back(std::move(d));
        continue;
      }
      RawClause rc;
      rc.span = start;
      rc.scope = p->scope = static_cast<int>(raws.size());
      if (p->at_ident("bot")) {
        p->next();
      } else if (!p->at(Tok::ColonDash)) {
        do rc.heads.push_back(p->formula());
        while (p->accept(Tok::Comma));
      }
      if (p->accept(Tok::ColonDash)) {
        do rc.body.push_back(p->formula());
        while (p->accept(Tok::Comma));
      }
      p->expect(Tok::Dot, "'.' at end of clause");
      if (rc.heads.empty() && rc.body.empty()) throw Failure{{start, "empty clause"}};
      raws.push_back(std::move(rc));
    } catch (const Failure& f) {
      diags.push_back(f.diag);
      p->recover();
    }
  }
  if (raws.empty() && diags.empty()) diags.push_back({p->peek().span, "at least one clause required"});
  if (!diags.empty()) throw ParseError(diags);

  // sorts
  SortUnifier u;
  std::map<std::string, Decl> declared;
  for (const auto& d : decls) {
    if (declared.count(d.name)) diags.push_back({d.span, "duplicate declaration of " + d.name});
    if (d.kind != default_kind(d.name) && default_kind(d.name) != Kind::Ord)
      diags.push_back({d.span, "kind conflict: " + d.name + " declared " + std::string(to_string(d.kind)) +
                                   " but its prefix implies " + std::string(to_string(default_kind(d.name)))});
    auto ar = p->arities.find(d.name);
    if (ar != p->arities.end() && ar->second != d.sorts.size())
      diags.push_back({d.span, d.name + " declared with " + std::to_string(d.sorts.size()) + " arguments"});
    for (std::size_t i = 0; i < d.sorts.size(); ++i)
      if (!u.set(u.key(pos_key(d.name, i)), d.sorts[i])) diags.push_back({d.span, "sort conflict in " + d.name});
    declared.emplace(d.name, d);
  }
  seed_annotations(u, p->annotations, diags);
  for (const auto& rc : raws) {
    SortWalker w{u, diags, rc.span, rc.scope};
    for (const auto& f : rc.heads) w.formula(f);
    for (const auto& f : rc.body) w.formula(f);
  }
  if (!diags.empty()) throw ParseError(diags);

  PfwCsp problem;
  for (const auto& [name, d] : declared) problem.kinding[name] = PredSignature{d.kind, d.sorts};
  for (const auto& [name, n] : p->arities) {
    if (problem.kinding.count(name)) continue;
    PredSignature sig{default_kind(name), {}};
    for (std::size_t i = 0; i < n; ++i) sig.sorts.push_back(u.get(pos_key(name, i)));
    problem.kinding[name] = sig;
  }
  for (const auto& rc : raws) {
    auto sort_of = [&](const std::string& n) { return u.get(var_key(rc.scope, n)); };
    std::vector<Formula> heads, body;
    for (const auto& f : rc.heads) heads.push_back(resort(f, sort_of));
    for (const auto& f : rc.body) body.push_back(resort(f, sort_of));
    for (auto& c : normalize_clause(heads, body)) problem.clauses.push_back(std::move(c));
  }
  for (const auto& e : check_well_sorted(problem))
    diags.push_back({raws.empty() ? SourceSpan{} : raws[std::min(e.clause_index, raws.size() - 1)].span,
                     e.message + " in " + e.atom});
  if (!diags.empty()) throw ParseError(diags);
  return problem;
}

Candidate parse_candidate(std::string_view text, const Kinding* kinding) {
  std::vector<Diagnostic> diags;
  std::optional<Parser> p;
  try {
    p.emplace(text);
  } catch (const Failure& f) {
    throw ParseError({f.diag});
  }
  struct RawDef {
    std::string name;
    VarList params;
    std::vector<bool> annotated;
    Formula body;
    SourceSpan span;
    int scope;
  };
  std::vector<RawDef> defs;
  while (!p->at(Tok::End)) {
    try {
      RawDef d;
      d.span = p->peek().span;
      d.scope = p->scope = static_cast<int>(defs.size());
      d.name = p->ident("a predicate name");
      p->expect(Tok::LParen, "'('");
      if (!p->at(Tok::RParen)) {
        do {
          std::string n = p->ident("a parameter name");
          bool ann = p->accept(Tok::Colon);
          d.params.emplace_back(n, ann ? p->sort_name() : Sort::Int);
          d.annotated.push_back(ann);
        } while (p->accept(Tok::Comma));
      }
      p->expect(Tok::RParen, "')'");
      p->expect(Tok::ColonEq, "':='");
      d.body = p->formula();
      p->expect(Tok::Dot, "'.'");
      defs.push_back(std::move(d));
    } catch (const Failure& f) {
      diags.push_back(f.diag);
      p->recover();
    }
  }
  if (!diags.empty()) throw ParseError(diags);

  SortUnifier u;
  seed_annotations(u, p->annotations, diags);
  Candidate sigma;
  for (auto& d : defs) {
    const PredSignature* sig = nullptr;
    if (kinding) {
      auto it = kinding->find(d.name);
      if (it != kinding->end()) sig = &it->second;
    }
    if (sig && sig->sorts.size() != d.params.size())
      diags.push_back({d.span, "definition of " + d.name + " has the wrong arity"});
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      int k = u.key(var_key(d.scope, d.params[i].first));
      if (d.annotated[i]) u.set(k, d.params[i].second);
      if (sig && i < sig->sorts.size() && !u.set(k, sig->sorts[i]))
        diags.push_back({d.span, "sort of parameter " + d.params[i].first + " disagrees with the problem"});
    }
    SortWalker w{u, diags, d.span, d.scope};
    w.formula(d.body);
  }
  for (auto& d : defs) {
    auto sort_of = [&](const std::string& n) { return u.get(var_key(d.scope, n)); };
    PredicateDefinition def;
    for (const auto& [n, s] : d.params) def.params.emplace_back(n, sort_of(n));
    def.body = resort(d.body, sort_of);
    if (def.body.has_pred_app()) diags.push_back({d.span, "definition of " + d.name + " mentions a predicate"});
    for (const auto& [v, s] : free_vars(def.body)) {
      bool bound = std::any_of(def.params.begin(), def.params.end(), [&](const auto& pr) { return pr.first == v; });
      if (!bound) diags.push_back({d.span, "definition of " + d.name + " is not closed: " + v});
    }
    if (sigma.count(d.name)) diags.push_back({d.span, "duplicate definition of " + d.name});
    sigma[d.name] = std::move(def);
  }
  if (!diags.empty()) throw ParseError(diags);
  return sigma;
}

Formula parse_formula(std::string_view text, const VarSet& known, Kinding* preds) {
  std::vector<Diagnostic> diags;
  try {
    Parser p(text);
    Formula f = p.formula();
    if (!p.at(Tok::End)) p.fail("unexpected '" + p.peek().text + "' after formula");
    SortUnifier u;
    for (const auto& [n, s] : known) u.set(u.key(var_key(0, n)), s);
    if (preds)
      for (const auto& [n, sig] : *preds)
        for (std::size_t i = 0; i < sig.sorts.size(); ++i) u.set(u.key(pos_key(n, i)), sig.sorts[i]);
    seed_annotations(u, p.annotations, diags);
    SortWalker w{u, diags, {}, 0};
    w.formula(f);
    if (!diags.empty()) throw ParseError(diags);
    if (preds) {
      for (const auto& [name, n] : p.arities) {
        if (preds->count(name)) continue;
        PredSignature sig{default_kind(name), {}};
        for (std::size_t i = 0; i < n; ++i) sig.sorts.push_back(u.get(pos_key(name, i)));
        (*preds)[name] = sig;
      }
    }
    return resort(f, [&](const std::string& n) { return u.get(var_key(0, n)); });
  } catch (const Failure& f) {
    throw ParseError({f.diag});
  }
}

VarList TransitionSystem::state_vars() const {
  VarList out;
  for (const auto& v : vars)
    if (!consts.count(v.first)) out.push_back(v);
  return out;
}

TransitionSystem parse_transition_system(std::string_view text) {
  std::vector<Diagnostic> diags;
  TransitionSystem ts;
  struct Section {
    std::string name;
    std::string source;
    SourceSpan span;
  };
  std::vector<Section> formulas;
  bool have_vars = false, have_trans = false, have_final = false;
  try {
    Parser p(text);
    while (!p.at(Tok::End)) {
      SourceSpan span = p.peek().span;
      std::string sec = p.ident("a section name");
      if (sec == "vars") {
        auto vs = p.var_list();
        ts.vars.insert(ts.vars.end(), vs.begin(), vs.end());
        have_vars = true;
      } else if (sec == "const") {
        do ts.consts.insert(p.ident("a variable name"));
        while (p.accept(Tok::Comma));
      } else if (sec == "choice") {
        auto vs = p.var_list();
        ts.choice_vars.insert(ts.choice_vars.end(), vs.begin(), vs.end());
      } else if (sec == "successors") {
        ts.successors = std::stoi(p.expect(Tok::Int, "a number").text);
      } else if (sec == "init" || sec == "trans" || sec == "final" || sec == "choice_trans" || sec == "angelic_trans") {
        // re-parsed below once all declarations are known
        std::size_t from = p.peek().span.start;
        while (!p.at(Tok::End) && !p.at(Tok::Dot)) p.next();
        formulas.push_back({sec, std::string(text.substr(from, p.peek().span.start - from)), span});
        if (sec == "trans") have_trans = true;
        if (sec == "final") have_final = true;
      } else {
        throw Failure{{span, "unknown section '" + sec + "'"}};
      }
      p.expect(Tok::Dot, "'.' at end of section");
    }
  } catch (const Failure& f) {
    throw ParseError({f.diag});
  }
  if (!have_vars) diags.push_back({{}, "missing 'vars' section"});
  if (!have_trans) diags.push_back({{}, "missing 'trans' section"});
  if (!have_final) diags.push_back({{}, "missing 'final' section"});
  for (const auto& c : ts.consts)
    if (std::none_of(ts.vars.begin(), ts.vars.end(), [&](const auto& v) { return v.first == c; }))
      diags.push_back({{}, "constant " + c + " is not a declared variable"});
  if (!diags.empty()) throw ParseError(diags);

  int max_primes = std::max(1, ts.successors);
  VarSet base, primed;
  for (const auto& [n, s] : ts.vars) base[n] = s;
  for (const auto& [n, s] : ts.choice_vars) base[n] = s;
  primed = base;
  for (const auto& [n, s] : ts.vars) {
    if (ts.consts.count(n)) continue;
    std::string q = n;
    for (int k = 0; k < max_primes; ++k) primed[q += "'"] = s;
  }
  for (const auto& sec : formulas) {
    const VarSet& scope = (sec.name == "final" || sec.name == "init") ? base : primed;
    Formula f;
    try {
      f = parse_formula(sec.source, scope);
    } catch (const ParseError& e) {
      for (auto d : e.diagnostics()) {
        d.span.line += sec.span.line - 1;
        diags.push_back(d);
      }
      continue;
    }
    if (f.has_pred_app()) diags.push_back({sec.span, sec.name + " mentions a predicate variable"});
    for (const auto& [v, s] : free_vars(f)) {
      bool is_choice = std::any_of(ts.choice_vars.begin(), ts.choice_vars.end(), [&](auto& c) { return c.first == v; });
      if (!scope.count(v) || (sec.name == "final" && is_choice)) diags.push_back({sec.span, "undeclared variable " + v + " in " + sec.name});
    }
    if (sec.name == "trans") ts.trans = f;
    else if (sec.name == "final") ts.final = f;
    else if (sec.name == "init") ts.init = f;
    else if (sec.name == "choice_trans") ts.choice_trans = f;
    else if (sec.name == "angelic_trans") ts.angelic_trans = f;
  }
  if (ts.successors > 0 && !ts.angelic_trans) diags.push_back({{}, "'successors' given without 'angelic_trans'"});
  if (!diags.empty()) throw ParseError(diags);
  return ts;
}

}  // namespace pfw
