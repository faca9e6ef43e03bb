#include "pfw/canon.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

#include "pfw/ir_ops.hpp"
#include "pfw/printer.hpp"

namespace pfw {

namespace {

Integer gcd_of(const LinearExpr& e) {
  Integer g = 0;
  for (const auto& [v, k] : e.coeffs) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), Integer(abs(k)).get_mpz_t());
  return g;
}

std::string linear_text(const LinearExpr& e) {
  std::string s;
  for (const auto& [v, k] : e.coeffs) s += k.get_str() + "*" + v + "+";
  return s + e.constant.get_str();
}

LinearExpr negated(LinearExpr e) {
  e.constant = -e.constant;
  for (auto& [v, k] : e.coeffs) k = -k;
  return e;
}

}  // namespace

Formula canonical_atom(const Formula& atom) {
  if (atom.kind() != FormulaKind::Atom) return atom;
  const Term& l = atom.lhs();
  const Term& r = atom.rhs();
  if (l.sort() == Sort::Bool || r.sort() == Sort::Bool) {
    bool eq = atom.rel() == Rel::Eq;
    if (l.kind() == TermKind::BoolLit && r.kind() == TermKind::BoolLit)
      return Formula::constant((l.bool_value() == r.bool_value()) == eq);
    if (l.kind() == TermKind::BoolLit || r.kind() == TermKind::BoolLit) {
      const Term& lit = l.kind() == TermKind::BoolLit ? l : r;
      const Term& var = l.kind() == TermKind::BoolLit ? r : l;
      Formula b = Formula::bool_var(var.name());
      return lit.bool_value() == eq ? b : Formula::lnot(b);
    }
    if (l == r) return Formula::constant(eq);
    bool ordered = l.name() < r.name();
    return Formula::atom(atom.rel(), ordered ? l : r, ordered ? r : l);
  }
  LinearExpr e = linearize(Term::sub(l, r));
  Rel rel = atom.rel();
  switch (rel) {
    case Rel::Lt: e.constant += 1; rel = Rel::Le; break;
    case Rel::Ge: e = negated(e); rel = Rel::Le; break;
    case Rel::Gt: e = negated(e); e.constant += 1; rel = Rel::Le; break;
    default: break;
  }
  if (e.coeffs.empty()) {
    switch (rel) {
      case Rel::Le: return Formula::constant(e.constant <= 0);
      case Rel::Eq: return Formula::constant(e.constant == 0);
      default: return Formula::constant(e.constant != 0);
    }
  }
  Integer g = gcd_of(e);
  if (rel == Rel::Le) {
    for (auto& [v, k] : e.coeffs) k /= g;
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), e.constant.get_mpz_t(), g.get_mpz_t());
    e.constant = c;
  } else {
    if (e.constant % g != 0) return Formula::constant(rel == Rel::Ne);
    for (auto& [v, k] : e.coeffs) k /= g;
    e.constant /= g;
    if (e.coeffs.begin()->second < 0) e = negated(e);
  }
  return Formula::atom(rel, to_term(e), Term::int_lit(0));
}

namespace {

std::string arg_text(const Term& t) {
  if (t.sort() == Sort::Bool) return t.kind() == TermKind::Var ? t.name() : (t.bool_value() ? "true" : "false");
  return linear_text(linearize(t));
}

std::string pred_text(const Formula& f) {
  std::string s = f.name() + "(";
  for (std::size_t i = 0; i < f.args().size(); ++i) s += (i ? "," : "") + arg_text(f.args()[i]);
  return s + ")";
}

std::string text_nnf(const Formula& f);

void collect_children(const Formula& f, FormulaKind kind, std::set<std::string>& out) {
  for (const auto& c : f.children()) {
    if (c.kind() == kind) collect_children(c, kind, out);
    else out.insert(text_nnf(c));
  }
}

std::string text_nnf(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::BoolVar: return "b:" + f.name();
    case FormulaKind::PredApp: return pred_text(f);
    case FormulaKind::Not:
      if (f.operand().kind() == FormulaKind::PredApp) return "!" + pred_text(f.operand());
      if (f.operand().kind() == FormulaKind::BoolVar) return "!b:" + f.operand().name();
      return "!(" + text_nnf(nnf(f)) + ")";
    case FormulaKind::Atom: {
      Formula a = canonical_atom(f);
      if (a.kind() != FormulaKind::Atom) return text_nnf(a);
      if (a.lhs().sort() == Sort::Bool)
        return std::string(a.rel() == Rel::Eq ? "beq:" : "bne:") + a.lhs().name() + ":" + a.rhs().name();
      return std::string(to_string(a.rel())) + "0:" + linear_text(linearize(a.lhs()));
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::set<std::string> cs;
      collect_children(f, f.kind(), cs);
      bool is_and = f.kind() == FormulaKind::And;
      if (cs.count(is_and ? "false" : "true")) return is_and ? "false" : "true";
      cs.erase(is_and ? "true" : "false");
      if (cs.empty()) return is_and ? "true" : "false";
      if (cs.size() == 1) return *cs.begin();
      std::string s = is_and ? "and(" : "or(";
      bool first = true;
      for (const auto& c : cs) {
        s += (first ? "" : ";") + c;
        first = false;
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace

std::string canonical_text(const Formula& f) { return text_nnf(nnf(f)); }

bool complementary(const Formula& a, const Formula& b) {
  return canonical_text(Formula::lnot(a)) == canonical_text(b);
}

std::set<std::string> clause_disjuncts(const Clause& c) {
  std::set<std::string> out;
  auto add = [&](const Formula& f) {
    for (const auto& d : disjuncts(nnf(f))) out.insert(canonical_text(d));
  };
  for (const auto& a : c.positive) out.insert(pred_text(a.to_formula()));
  for (const auto& a : c.negative) out.insert("!" + pred_text(a.to_formula()));
  for (const auto& b : c.body_theory) add(Formula::lnot(b));
  for (const auto& h : c.head_theory) add(h);
  out.erase("false");
  return out;
}

// ---------------------------------------------------------------------------
// Structural comparison

namespace {

struct AtomRef {
  bool positive;
  const PredAtom* atom;
};

std::vector<AtomRef> atoms_of(const Clause& c) {
  std::vector<AtomRef> out;
  for (const auto& a : c.positive) out.push_back({true, &a});
  for (const auto& a : c.negative) out.push_back({false, &a});
  return out;
}

std::multiset<std::string> pred_profile(const Clause& c, const std::map<std::string, std::string>* rename) {
  std::multiset<std::string> out;
  for (const auto& r : atoms_of(c)) {
    std::string name = rename ? rename->at(r.atom->pred) : r.atom->pred;
    out.insert((r.positive ? "+" : "-") + name);
  }
  return out;
}

Clause rename_preds(const Clause& c, const std::map<std::string, std::string>& pi) {
  Clause r = c;
  for (auto& a : r.positive) a.pred = pi.at(a.pred);
  for (auto& a : r.negative) a.pred = pi.at(a.pred);
  return r;
}

class ClauseMatcher {
 public:
  ClauseMatcher(const Clause& a, const Clause& b, const std::set<std::string>& b_disjuncts)
      : a_(a), b_(b), target_(b_disjuncts) {}

  bool run() {
    // group atoms of both sides by (polarity, predicate)
    std::map<std::string, std::pair<std::vector<const PredAtom*>, std::vector<const PredAtom*>>> groups;
    for (const auto& r : atoms_of(a_)) groups[(r.positive ? "+" : "-") + r.atom->pred].first.push_back(r.atom);
    for (const auto& r : atoms_of(b_)) groups[(r.positive ? "+" : "-") + r.atom->pred].second.push_back(r.atom);
    for (auto& [k, g] : groups) {
      if (g.first.size() != g.second.size()) return false;
      groups_.push_back(g);
    }
    return assign(0);
  }

 private:
  using Map = std::map<std::string, std::string>;

  bool bind(Map& fwd, Map& bwd, const std::string& x, const std::string& y) {
    auto f = fwd.find(x);
    auto b = bwd.find(y);
    if (f != fwd.end() || b != bwd.end()) return f != fwd.end() && b != bwd.end() && f->second == y && b->second == x;
    fwd[x] = y;
    bwd[y] = x;
    return true;
  }

  bool align(const PredAtom& x, const PredAtom& y) {
    for (std::size_t i = 0; i < x.args.size(); ++i) {
      const Term& s = x.args[i];
      const Term& t = y.args[i];
      if (s.is_var() != t.is_var()) return false;
      if (s.is_var() && !bind(fwd_, bwd_, s.name(), t.name())) return false;
    }
    return true;
  }

  bool assign(std::size_t gi) {
    if (gi == groups_.size()) return finish();
    const auto& [xs, ys] = groups_[gi];
    std::vector<std::size_t> perm(ys.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Map f0 = fwd_, b0 = bwd_;
      bool ok = true;
      for (std::size_t i = 0; i < xs.size() && ok; ++i) ok = align(*xs[i], *ys[perm[i]]);
      if (ok && assign(gi + 1)) return true;
      fwd_ = std::move(f0);
      bwd_ = std::move(b0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  }

  bool finish() {
    std::vector<std::string> la, lb;
    for (const auto& [v, s] : a_.free_vars())
      if (!fwd_.count(v)) la.push_back(v);
    for (const auto& [v, s] : b_.free_vars())
      if (!bwd_.count(v)) lb.push_back(v);
    if (la.size() != lb.size()) return false;
    if (la.size() > 6) {
      // too many to permute; only identity-like pairing
      for (std::size_t i = 0; i < la.size(); ++i) fwd_[la[i]] = lb[i];
      return check();
    }
    std::vector<std::size_t> perm(lb.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Map saved = fwd_;
      for (std::size_t i = 0; i < la.size(); ++i) fwd_[la[i]] = lb[perm[i]];
      if (check()) return true;
      fwd_ = std::move(saved);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  }

  bool check() const {
    Clause r = rename_vars(a_, [&](const std::string& v) {
      auto it = fwd_.find(v);
      return it == fwd_.end() ? v : it->second;
    });
    return clause_disjuncts(r) == target_;
  }

  const Clause& a_;
  const Clause& b_;
  const std::set<std::string>& target_;
  std::vector<std::pair<std::vector<const PredAtom*>, std::vector<const PredAtom*>>> groups_;
  Map fwd_, bwd_;
};

// maximum bipartite matching (Kuhn)
std::size_t max_matching(const std::vector<std::vector<bool>>& adj, std::vector<int>& match_right) {
  std::size_t n = adj.size(), m = n ? adj[0].size() : 0;
  match_right.assign(m, -1);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen(m, false);
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
      for (std::size_t v = 0; v < m; ++v) {
        if (!adj[u][v] || seen[v]) continue;
        seen[v] = true;
        if (match_right[v] < 0 || dfs(static_cast<std::size_t>(match_right[v]))) {
          match_right[v] = static_cast<int>(u);
          return true;
        }
      }
      return false;
    };
    if (dfs(i)) ++count;
  }
  return count;
}

std::size_t occurrences(const PfwCsp& p, const std::string& pred) {
  std::size_t n = 0;
  for (const auto& c : p.clauses)
    for (const auto& r : atoms_of(c)) n += r.atom->pred == pred;
  return n;
}

}  // namespace

StructuralMatch compare_structurally(const PfwCsp& left, const PfwCsp& right) {
  StructuralMatch result;
  if (left.clauses.size() != right.clauses.size()) {
    result.message = "clause counts differ: " + std::to_string(left.clauses.size()) + " vs " +
                     std::to_string(right.clauses.size());
    return result;
  }
  auto used = [](const PfwCsp& p) {
    std::vector<std::string> names;
    for (const auto& [n, sig] : p.kinding)
      if (occurrences(p, n) > 0) names.push_back(n);
    return names;
  };
  std::vector<std::string> lp = used(left), rp = used(right);
  if (lp.size() != rp.size()) {
    result.message = "different numbers of predicate variables";
    return result;
  }
  std::vector<std::set<std::string>> right_disj;
  std::vector<std::multiset<std::string>> right_prof;
  for (const auto& c : right.clauses) {
    right_disj.push_back(clause_disjuncts(c));
    right_prof.push_back(pred_profile(c, nullptr));
  }

  std::size_t best = 0;
  bool any_bijection = false;
  std::map<std::string, std::string> pi;
  std::set<std::string> taken;

  std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
    if (i < lp.size()) {
      const auto& sig = left.kinding.at(lp[i]);
      for (const auto& r : rp) {
        if (taken.count(r) || !(right.kinding.at(r) == sig)) continue;
        pi[lp[i]] = r;
        taken.insert(r);
        if (search(i + 1)) return true;
        taken.erase(r);
        pi.erase(lp[i]);
      }
      return false;
    }
    any_bijection = true;
    // cheap filter: every clause profile must have a partner
    std::vector<std::vector<bool>> adj(left.clauses.size(), std::vector<bool>(right.clauses.size(), false));
    std::size_t with_partner = 0;
    std::optional<std::size_t> missing;
    for (std::size_t a = 0; a < left.clauses.size(); ++a) {
      auto prof = pred_profile(left.clauses[a], &pi);
      bool any = false;
      for (std::size_t b = 0; b < right.clauses.size(); ++b) any = any || prof == right_prof[b];
      if (any) ++with_partner;
      else if (!missing) missing = a;
    }
    if (missing) {
      if (with_partner > best || result.message.empty()) {
        best = with_partner;
        result.message = "no counterpart for clause " + std::to_string(*missing + 1) + ":\n" + to_text(left.clauses[*missing]);
        result.pred_map = pi;
      }
      return false;
    }
    for (std::size_t a = 0; a < left.clauses.size(); ++a) {
      Clause ra = rename_preds(left.clauses[a], pi);
      auto prof = pred_profile(left.clauses[a], &pi);
      for (std::size_t b = 0; b < right.clauses.size(); ++b) {
        if (prof != right_prof[b]) continue;
        adj[a][b] = ClauseMatcher(ra, right.clauses[b], right_disj[b]).run();
      }
    }
    std::vector<int> match;
    std::size_t m = max_matching(adj, match);
    if (m == left.clauses.size()) {
      result.equal = true;
      result.pred_map = pi;
      return true;
    }
    if (m >= best) {
      best = m;
      std::vector<bool> matched_left(left.clauses.size(), false);
      for (int u : match)
        if (u >= 0) matched_left[u] = true;
      for (std::size_t a = 0; a < left.clauses.size(); ++a)
        if (!matched_left[a]) {
          result.message = "no counterpart for clause " + std::to_string(a + 1) + ":\n" + to_text(left.clauses[a]);
          break;
        }
      result.pred_map = pi;
    }
    return false;
  };
  search(0);
  if (!result.equal && !any_bijection) result.message = "no kind/signature-preserving predicate bijection";
  return result;
}

}  // namespace pfw
