#include "pfw/encoder.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "pfw/canon.hpp"
#include "pfw/ir_ops.hpp"
#include "pfw/parser.hpp"

namespace pfw {

std::string_view to_string(RelationalKind kind) {
  switch (kind) {
    case RelationalKind::KSafety: return "ksafety";
    case RelationalKind::CoTermination: return "coterm";
    case RelationalKind::TIGNI: return "tigni";
    case RelationalKind::TSGNI: return "tsgni";
  }
  return "?";
}

std::optional<RelationalKind> parse_relational_kind(std::string_view text) {
  for (auto k : {RelationalKind::KSafety, RelationalKind::CoTermination, RelationalKind::TIGNI, RelationalKind::TSGNI})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::string copy_name(const std::string& var, std::size_t copy, int primes) {
  return var + std::to_string(copy) + std::string(static_cast<std::size_t>(primes), '\'');
}

namespace {

bool is_gni(RelationalKind k) { return k == RelationalKind::TIGNI || k == RelationalKind::TSGNI; }
bool has_bound(RelationalKind k) { return k == RelationalKind::CoTermination || k == RelationalKind::TSGNI; }

std::pair<std::string, int> split_primes(const std::string& name) {
  std::size_t n = name.size();
  while (n > 0 && name[n - 1] == '\'') --n;
  return {name.substr(0, n), static_cast<int>(name.size() - n)};
}

Formula to_copy(const Formula& f, const TransitionSystem& ts, std::size_t i) {
  std::set<std::string> names;
  for (const auto& v : ts.vars) names.insert(v.first);
  for (const auto& v : ts.choice_vars) names.insert(v.first);
  return rename_vars(f, [&](const std::string& n) {
    auto [base, k] = split_primes(n);
    return names.count(base) ? copy_name(base, i, k) : n;
  });
}

bool is_literal(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::BoolVar: return true;
    case FormulaKind::Not: return f.operand().kind() == FormulaKind::BoolVar;
    default: return false;
  }
}

void push_unique(std::vector<Formula>& xs, const Formula& f) {
  if (std::find(xs.begin(), xs.end(), f) == xs.end()) xs.push_back(f);
}

// Flattens body conjunctions and drops disjuncts of body disjunctions that
// contradict a unit literal of the body; a lone survivor is inlined.
std::vector<Formula> prune_body(const std::vector<Formula>& body) {
  std::vector<Formula> flat;
  for (const auto& b : body) {
    if (b.has_pred_app()) push_unique(flat, b);
    else
      for (const auto& c : conjuncts(b))
        if (!c.is_true()) push_unique(flat, c);
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Formula> units;
    for (const auto& f : flat)
      if (is_literal(f)) units.push_back(f);
    for (std::size_t i = 0; i < flat.size() && !changed; ++i) {
      const Formula& f = flat[i];
      if (f.kind() != FormulaKind::Or || f.has_pred_app()) continue;
      std::vector<Formula> kept;
      for (const auto& d : f.children()) {
        bool dead = false;
        for (const auto& c : conjuncts(d)) {
          if (!is_literal(c)) continue;
          for (const auto& u : units) dead = dead || complementary(c, u);
        }
        if (!dead) kept.push_back(d);
      }
      if (kept.size() == f.children().size()) continue;
      changed = true;
      std::vector<Formula> next(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(i));
      std::vector<Formula> tail(flat.begin() + static_cast<std::ptrdiff_t>(i) + 1, flat.end());
      if (kept.empty()) next.push_back(Formula::bottom());
      else if (kept.size() == 1)
        for (const auto& c : conjuncts(kept[0])) push_unique(next, c);
      else next.push_back(Formula::lor(kept));
      for (const auto& t : tail) push_unique(next, t);
      flat = std::move(next);
    }
  }
  return flat;
}

// "a => b" written as a disjunction: negated disjuncts become body.
void split_post(const Formula& post, std::vector<Formula>& heads, std::vector<Formula>& body) {
  for (const auto& d : disjuncts(post)) {
    if (d.kind() == FormulaKind::Not && d.operand().kind() != FormulaKind::BoolVar) body.push_back(d.operand());
    else if (!d.is_false()) heads.push_back(d);
  }
}

class Encoder {
 public:
  Encoder(const RelationalProblem& p, const EncoderOptions& o) : p_(p), o_(o), k_(p.systems.size()) {
    check();
    gni_ = is_gni(p.kind);
    bound_ = has_bound(p.kind);
    for (std::size_t i = 1; i <= k_; ++i) {
      const auto& ts = sys(i);
      int maxp = std::max(1, ts.successors);
      for (const auto& [v, s] : ts.vars)
        for (int k = 0; k <= (ts.consts.count(v) ? 0 : maxp); ++k) used_.insert(copy_name(v, i, k));
      for (const auto& [v, s] : ts.choice_vars) used_.insert(copy_name(v, i));
    }
    if (bound_) {
      d_ = fresh_term("d");
      b_ = fresh_term("b");
    }
    if (gni_) {
      const auto& ts = sys(1);
      for (const auto& [v, s] : ts.vars) {
        if (o_.prophecy && std::find(o_.prophecy->begin(), o_.prophecy->end(), v) == o_.prophecy->end()) continue;
        prophecy_.emplace_back(fresh_term("p_" + v), s);
        prophecy_base_.push_back(v);
      }
      if (o_.prophecy)
        for (const auto& v : *o_.prophecy)
          if (std::find(prophecy_base_.begin(), prophecy_base_.end(), v) == prophecy_base_.end())
            throw EncodeError("prophecy variable " + v + " is not a variable of system 1");
    }
  }

  VarSet vocabulary() const {
    VarSet out;
    for (std::size_t i = 1; i <= k_; ++i) {
      const auto& ts = sys(i);
      int maxp = std::max(1, ts.successors);
      for (const auto& [v, s] : ts.vars)
        for (int k = 0; k <= (ts.consts.count(v) ? 0 : maxp); ++k) out[copy_name(v, i, k)] = s;
    }
    if (bound_) {
      out[d_] = Sort::Int;
      out[d_ + "'"] = Sort::Int;
      out[b_] = Sort::Int;
    }
    for (const auto& [n, s] : prophecy_) out[n] = s;
    return out;
  }

  Encoding run() {
    check_vocabulary();
    Encoding& e = out_;
    e.problem.kinding = p_.user_preds;
    name_preds();

    std::vector<int> zero(k_, 0);
    Term d = bound_ ? Term::var(d_) : Term::int_lit(0);
    Term dn = bound_ ? Term::var(d_ + "'") : Term::int_lit(0);
    Term b = Term::var(b_.empty() ? "b" : b_);

    // (1) initiation
    {
      std::vector<Formula> body{p_.pre};
      for (std::size_t i = 1; i <= k_; ++i)
        if (sys(i).init) body.push_back(to_copy(*sys(i).init, sys(i), i));
      if (bound_) {
        std::vector<Term> args = bound_args();
        args.push_back(b);
        body.push_back(Formula::pred(fnbnd_, args));
      }
      emit({inv(zero, Term::int_lit(0))}, body);
    }

    // (3) consecution under the scheduler
    const std::size_t full = (std::size_t{1} << k_) - 1;
    for (std::size_t a = 1; a <= full; ++a) {
      std::vector<Formula> body{inv(zero, d), sch(a, zero, d)};
      std::vector<std::vector<int>> alts{zero};
      for (std::size_t i = 1; i <= k_; ++i) {
        if (!(a >> (i - 1) & 1)) continue;
        Step st = step(i);
        body.insert(body.end(), st.body.begin(), st.body.end());
        std::vector<std::vector<int>> next;
        for (const auto& prev : alts)
          for (int pr : st.primes) {
            auto v = prev;
            v[i - 1] = pr;
            next.push_back(v);
          }
        alts = std::move(next);
      }
      Term dh = d;
      if (bound_ && (a == 1 || a == 2)) {
        Term upd = a == 1 ? Term::add(d, Term::int_lit(1)) : Term::sub(d, Term::int_lit(1));
        body.push_back(Formula::lor({final(1, fair_prophecy()), final(2, false), Formula::atom(Rel::Eq, dn, upd)}));
        dh = dn;
      }
      std::vector<Formula> heads;
      for (const auto& pr : alts) heads.push_back(inv(pr, dh));
      emit(heads, body);
    }

    // (4) fairness: a scheduled set contains an unfinished program
    for (std::size_t a = 1; a < full; ++a) {
      std::vector<Formula> heads, rest;
      for (std::size_t i = 1; i <= k_; ++i)
        ((a >> (i - 1) & 1) ? heads : rest).push_back(unfinished(i, i == 1 && fair_prophecy()));
      emit(heads, {inv(zero, d), sch(a, zero, d), Formula::lor(rest)});
    }

    // (5) some set is always scheduled
    {
      std::vector<Formula> heads, any;
      for (std::size_t a = 1; a <= full; ++a) heads.push_back(sch(a, zero, d));
      for (std::size_t i = 1; i <= k_; ++i) any.push_back(unfinished(i, i == 1 && fair_prophecy()));
      emit(heads, {inv(zero, d), Formula::lor(any)});
    }

    if (!bound_) {
      // (2) the post-condition at final states
      std::vector<Formula> heads, body{inv(zero, d)};
      for (std::size_t i = 1; i <= k_; ++i) body.push_back(final(i, i == 1 && fair_prophecy()));
      if (gni_) body.push_back(prophecy_matches());
      split_post(*p_.post, heads, body);
      emit(heads, body);
    } else {
      // (2) bounded step difference while both run
      Term nb = Term::neg(b);
      Formula bounded = Formula::land({Formula::atom(Rel::Le, nb, d), Formula::atom(Rel::Le, d, b),
                                       Formula::atom(Rel::Ge, b, Term::int_lit(0))});
      emit({bounded}, {inv(zero, d), unfinished(1, fair_prophecy()), unfinished(2, false)});

      if (gni_) {
        std::vector<Formula> heads, body{inv(zero, d), final(1, true), final(2, false)};
        split_post(*p_.post, heads, body);
        emit(heads, body);
      }

      // (6) the second program terminates once the first has
      {
        Step st = step(2);
        std::vector<Formula> body{inv(zero, d), final(1, gni_), unfinished(2, false)};
        body.insert(body.end(), st.body.begin(), st.body.end());
        std::vector<Formula> heads;
        for (int pr : st.primes) heads.push_back(wf_atom(wfr_, 2, pr));
        emit(heads, body);
      }
      if (o_.symmetric) {
        Step st = step(1);
        std::vector<Formula> body{inv(zero, d), final(2, false), unfinished(1, false)};
        body.insert(body.end(), st.body.begin(), st.body.end());
        std::vector<Formula> heads;
        for (int pr : st.primes) heads.push_back(wf_atom(wfr1_, 1, pr));
        emit(heads, body);
      }
    }

    e.artifacts.inv = inv_;
    e.artifacts.sch = sch_;
    e.artifacts.fnbnd = fnbnd_;
    e.artifacts.fnr = fnr_;
    if (!wfr1_.empty()) e.artifacts.wfr.push_back(wfr1_);
    if (!wfr_.empty()) e.artifacts.wfr.push_back(wfr_);
    e.artifacts.d = d_;
    e.artifacts.b = b_;
    for (const auto& [n, s] : prophecy_) e.artifacts.prophecy.push_back(n);
    return std::move(out_);
  }

 private:
  struct Step {
    std::vector<Formula> body;
    std::vector<int> primes;  // successor copies for the head
  };

  const TransitionSystem& sys(std::size_t i) const { return p_.systems[i - 1]; }
  bool fair_prophecy() const { return gni_ && o_.prophecy_final_everywhere; }

  void check() const {
    const auto& k = p_.kind;
    if (k_ == 0) throw EncodeError("at least one system is required");
    if (k != RelationalKind::KSafety && k_ != 2)
      throw EncodeError(std::string(to_string(k)) + " needs exactly 2 systems, got " + std::to_string(k_));
    if (k_ > 6) throw EncodeError("too many systems for an explicit scheduler");
    if (k != RelationalKind::CoTermination && !p_.post) throw EncodeError("a post-condition is required");
    if (k == RelationalKind::CoTermination && p_.post) throw EncodeError("co-termination takes no post-condition");
    if (is_gni(k) && !p_.systems[1].choice_trans && p_.systems[1].successors == 0)
      throw EncodeError("system 2 needs choice_trans or angelic_trans for " + std::string(to_string(k)));
    if (o_.symmetric && k != RelationalKind::CoTermination)
      throw EncodeError("the symmetric option applies to co-termination only");
    if (o_.bound_args && !has_bound(k)) throw EncodeError("bound arguments apply to co-termination kinds only");
  }

  void check_vocabulary() const {
    VarSet voc = vocabulary();
    auto against = [&](const Formula& f, const char* what) {
      for (const auto& [n, s] : free_vars(f)) {
        auto it = voc.find(n);
        if (it != voc.end() && it->second != s)
          throw EncodeError(std::string(what) + ": " + n + " is used as " + std::string(to_string(s)) +
                            " but the system declares " + std::string(to_string(it->second)));
      }
    };
    against(p_.pre, "pre");
    if (p_.post) against(*p_.post, "post");
  }

  std::string fresh_term(std::string base) {
    while (used_.count(base)) base += "_";
    used_.insert(base);
    return base;
  }

  std::string fresh_pred(std::string base) {
    while (p_.user_preds.count(base) || out_.problem.kinding.count(base)) base += "_";
    return base;
  }

  void declare(const std::string& name, Kind kind, std::vector<Sort> sorts) {
    out_.problem.kinding[name] = PredSignature{kind, std::move(sorts)};
  }

  std::vector<Sort> state_sorts() const {
    std::vector<Sort> s;
    if (bound_) s = {Sort::Int, Sort::Int};
    for (const auto& p : prophecy_) s.push_back(p.second);
    for (std::size_t i = 1; i <= k_; ++i)
      for (const auto& v : sys(i).vars) s.push_back(v.second);
    return s;
  }

  static std::string sch_name(std::size_t a, std::size_t k) {
    std::string s = "Sch";
    for (std::size_t i = 0; i < k; ++i) s += (a >> i & 1) ? 'T' : 'F';
    return s;
  }

  void name_preds() {
    inv_ = fresh_pred("Inv");
    declare(inv_, Kind::Ord, state_sorts());
    for (std::size_t a = 1; a < (std::size_t{1} << k_); ++a) {
      sch_.push_back(fresh_pred(sch_name(a, k_)));
      declare(sch_.back(), Kind::Ord, state_sorts());
    }
    if (bound_) {
      fnbnd_ = fresh_pred("FN_DB");
      std::vector<Sort> s;
      for (const auto& t : bound_args()) s.push_back(t.sort());
      s.push_back(Sort::Int);
      declare(fnbnd_, Kind::FN, s);
      auto wf_sorts = [&](std::size_t i) {
        std::vector<Sort> s;
        for (int h = 0; h < 2; ++h)
          for (const auto& v : sys(i).vars) s.push_back(v.second);
        return s;
      };
      if (o_.symmetric) {
        wfr1_ = fresh_pred("WF_R1");
        declare(wfr1_, Kind::WF, wf_sorts(1));
        wfr_ = fresh_pred("WF_R2");
      } else {
        wfr_ = fresh_pred("WF_R");
      }
      declare(wfr_, Kind::WF, wf_sorts(2));
    }
    if (gni_ && sys(2).successors == 0) {
      const auto& rs = sys(2).choice_vars;
      for (const auto& [r, s] : rs) {
        fnr_.push_back(fresh_pred(rs.size() == 1 ? "FN_R" : "FN_R_" + r));
        std::vector<Sort> sorts;
        for (const auto& p : prophecy_) sorts.push_back(p.second);
        for (const auto& v : sys(2).vars) sorts.push_back(v.second);
        sorts.push_back(s);
        declare(fnr_.back(), Kind::FN, sorts);
      }
    }
  }

  std::vector<Term> state(std::size_t i, int primes) const {
    const auto& ts = sys(i);
    std::vector<Term> out;
    for (const auto& [v, s] : ts.vars) out.push_back(Term::var(copy_name(v, i, ts.consts.count(v) ? 0 : primes), s));
    return out;
  }

  std::vector<Term> args(const std::vector<int>& primes, const Term& d) const {
    std::vector<Term> out;
    if (bound_) {
      out.push_back(d);
      out.push_back(Term::var(b_));
    }
    for (const auto& [n, s] : prophecy_) out.push_back(Term::var(n, s));
    for (std::size_t i = 1; i <= k_; ++i) {
      auto st = state(i, primes[i - 1]);
      out.insert(out.end(), st.begin(), st.end());
    }
    return out;
  }

  std::vector<Term> bound_args() const {
    std::vector<Term> out;
    auto wanted = [&](const std::string& n) {
      return !o_.bound_args || std::find(o_.bound_args->begin(), o_.bound_args->end(), n) != o_.bound_args->end();
    };
    for (const auto& [n, s] : prophecy_)
      if (wanted(n)) out.push_back(Term::var(n, s));
    for (std::size_t i = 1; i <= k_; ++i)
      for (const auto& [v, s] : sys(i).vars)
        if (wanted(v)) out.push_back(Term::var(copy_name(v, i), s));
    return out;
  }

  Formula inv(const std::vector<int>& primes, const Term& d) const { return Formula::pred(inv_, args(primes, d)); }
  Formula sch(std::size_t a, const std::vector<int>& primes, const Term& d) const {
    return Formula::pred(sch_[a - 1], args(primes, d));
  }

  Formula wf_atom(const std::string& name, std::size_t i, int primes) const {
    auto a = state(i, 0);
    auto b = state(i, primes);
    a.insert(a.end(), b.begin(), b.end());
    return Formula::pred(name, a);
  }

  Formula prophecy_matches() const {
    std::vector<Formula> eqs;
    for (std::size_t j = 0; j < prophecy_.size(); ++j) {
      Sort s = prophecy_[j].second;
      eqs.push_back(Formula::atom(Rel::Eq, Term::var(prophecy_[j].first, s), Term::var(copy_name(prophecy_base_[j], 1), s)));
    }
    return Formula::land(eqs);
  }

  Formula final(std::size_t i, bool with_prophecy) const {
    Formula f = to_copy(sys(i).final, sys(i), i);
    return with_prophecy ? Formula::land(f, prophecy_matches()) : f;
  }

  Formula unfinished(std::size_t i, bool with_prophecy) const {
    return nnf(Formula::lnot(final(i, with_prophecy)));
  }

  Step step(std::size_t i) const {
    const auto& ts = sys(i);
    Step st;
    if (gni_ && i == 2) {
      if (ts.successors > 0) {
        st.body.push_back(to_copy(*ts.angelic_trans, ts, i));
        for (int k = 1; k <= ts.successors; ++k) st.primes.push_back(k);
        return st;
      }
      for (std::size_t j = 0; j < ts.choice_vars.size(); ++j) {
        std::vector<Term> a;
        for (const auto& [n, s] : prophecy_) a.push_back(Term::var(n, s));
        auto x = state(2, 0);
        a.insert(a.end(), x.begin(), x.end());
        a.push_back(Term::var(copy_name(ts.choice_vars[j].first, 2), ts.choice_vars[j].second));
        st.body.push_back(Formula::pred(fnr_[j], a));
      }
      st.body.push_back(to_copy(*ts.choice_trans, ts, i));
      st.primes = {1};
      return st;
    }
    st.body.push_back(to_copy(ts.trans, ts, i));
    st.primes = {1};
    return st;
  }

  void emit(const std::vector<Formula>& heads, const std::vector<Formula>& body) {
    for (auto& c : make_clauses(heads, prune_body(body))) out_.problem.clauses.push_back(std::move(c));
  }

  const RelationalProblem& p_;
  const EncoderOptions& o_;
  std::size_t k_;
  bool gni_ = false, bound_ = false;
  std::set<std::string> used_;
  std::string d_, b_;
  VarList prophecy_;
  std::vector<std::string> prophecy_base_;
  std::string inv_, fnbnd_, wfr_, wfr1_;
  std::vector<std::string> sch_, fnr_;
  Encoding out_;
};

}  // namespace

VarSet encoding_vocabulary(const RelationalProblem& problem, const EncoderOptions& options) {
  return Encoder(problem, options).vocabulary();
}

Encoding encode(const RelationalProblem& problem, const EncoderOptions& options) {
  return Encoder(problem, options).run();
}

PfwCsp encode_ksafety(const RelationalProblem& problem) {
  if (problem.kind != RelationalKind::KSafety) throw EncodeError("not a k-safety problem");
  return encode(problem).problem;
}

PfwCsp encode_coterm(const RelationalProblem& problem, bool symmetric) {
  if (problem.kind != RelationalKind::CoTermination) throw EncodeError("not a co-termination problem");
  EncoderOptions o;
  o.symmetric = symmetric;
  return encode(problem, o).problem;
}

PfwCsp encode_tigni(const RelationalProblem& problem, const EncoderOptions& options) {
  if (problem.kind != RelationalKind::TIGNI) throw EncodeError("not a TI-GNI problem");
  return encode(problem, options).problem;
}

PfwCsp encode_tsgni(const RelationalProblem& problem, const EncoderOptions& options) {
  if (problem.kind != RelationalKind::TSGNI) throw EncodeError("not a TS-GNI problem");
  return encode(problem, options).problem;
}

PfwCsp add_hints(const PfwCsp& problem, const std::vector<Clause>& hints) {
  PfwCsp out = problem;
  out.clauses.insert(out.clauses.end(), hints.begin(), hints.end());
  auto errors = check_well_sorted(out);
  if (!errors.empty()) throw EncodeError("hint is not well-sorted: " + errors.front().message + " in " + errors.front().atom);
  return out;
}

// ---------------------------------------------------------------------------
// Lint

namespace {

Formula unchanged(const TransitionSystem& ts, int primes, bool negate) {
  std::vector<Formula> parts;
  for (const auto& [v, s] : ts.state_vars()) {
    Term a = Term::var(v, s), b = Term::var(v + std::string(static_cast<std::size_t>(primes), '\''), s);
    parts.push_back(Formula::atom(negate ? Rel::Ne : Rel::Eq, a, b));
  }
  return negate ? Formula::lor(parts) : Formula::land(parts);
}

// x' -> x'' for state variables
Formula shift_primes(const Formula& f, const TransitionSystem& ts) {
  std::set<std::string> state;
  for (const auto& v : ts.state_vars()) state.insert(v.first);
  return rename_vars(f, [&](const std::string& n) {
    auto [base, k] = split_primes(n);
    return (k == 1 && state.count(base)) ? base + "''" : n;
  });
}

}  // namespace

std::vector<LintIssue> lint(const RelationalProblem& problem, SmtSession& session) {
  std::vector<LintIssue> issues;
  auto ask = [&](std::size_t i, const std::string& check, const std::vector<Formula>& fs, const std::string& what) {
    std::vector<LabeledFormula> q;
    for (const auto& f : fs) q.emplace_back("", f);
    SmtResult r = session.check(q, false, false);
    if (r.sat()) issues.push_back({i, check, what});
    else if (r.unknown()) issues.push_back({i, check, "undecided (" + r.reason + "): " + what});
  };
  for (std::size_t i = 1; i <= problem.systems.size(); ++i) {
    const auto& ts = problem.systems[i - 1];
    ask(i, "final-self-loop", {ts.final, ts.trans, unchanged(ts, 1, true)},
        "a final state has a transition that changes the state");
    if (ts.successors > 0 && ts.angelic_trans) {
      std::vector<Formula> moved;
      for (int k = 1; k <= ts.successors; ++k) moved.push_back(unchanged(ts, k, true));
      ask(i, "final-self-loop", {ts.final, *ts.angelic_trans, Formula::lor(moved)},
          "a final state has an angelic successor that changes the state");
    }
    if (!ts.choice_trans) continue;
    const Formula& u = *ts.choice_trans;
    {
      std::vector<Formula> diff;
      for (const auto& [v, s] : ts.state_vars())
        diff.push_back(Formula::atom(Rel::Ne, Term::var(v + "'", s), Term::var(v + "''", s)));
      ask(i, "choice-functional", {u, shift_primes(u, ts), Formula::lor(diff)},
          "choice_trans is not functional in the choice");
    }
    ask(i, "choice-sound", {u, Formula::lnot(ts.trans)}, "choice_trans allows a step that trans does not");
    {
      VarSet decls;
      collect_vars(ts.trans, decls);
      for (const auto& [r, s] : ts.choice_vars) decls.erase(r);
      VarSet uvars = free_vars(u);
      for (const auto& [n, s] : uvars) {
        bool is_r = std::any_of(ts.choice_vars.begin(), ts.choice_vars.end(), [&](auto& c) { return c.first == n; });
        if (!is_r) decls[n] = s;
      }
      std::ostringstream all;
      all << "(forall (";
      for (const auto& [r, s] : ts.choice_vars) all << "(" << smt_symbol(r) << (s == Sort::Int ? " Int)" : " Bool)");
      all << ") (not " << lower(u) << "))";
      SmtResult r = session.check_script(decls, {lower(ts.trans), all.str()});
      if (r.sat()) issues.push_back({i, "choice-total", "a step of trans has no choice value in choice_trans"});
      else if (r.unknown()) issues.push_back({i, "choice-total", "undecided (" + r.reason + ")"});
    }
  }
  return issues;
}

}  // namespace pfw
