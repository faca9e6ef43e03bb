#include "pfw/templates.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "pfw/ir_ops.hpp"

namespace pfw {

const std::vector<std::string>& param_names(Kind kind) {
  static const std::vector<std::string> ord = {"nd", "nc", "ac", "ad"};
  static const std::vector<std::string> wf = {"np", "nl", "nc", "rc", "rd", "dc", "dd"};
  static const std::vector<std::string> fn = {"nd", "nc", "dc", "dd", "ec", "ed"};
  return kind == Kind::Ord ? ord : kind == Kind::WF ? wf : fn;
}

const std::vector<std::string>& param_rotation(Kind kind) {
  static const std::vector<std::string> ord = {"nd", "nc", "ad", "ac"};
  static const std::vector<std::string> wf = {"nl", "np", "nc", "rd", "rc", "dd", "dc"};
  static const std::vector<std::string> fn = {"nd", "nc", "ed", "ec", "dd", "dc"};
  return kind == Kind::Ord ? ord : kind == Kind::WF ? wf : fn;
}

namespace {

// parameters counting template pieces, as opposed to coefficient bounds
bool is_shape_param(const std::string& name) {
  return name == "nd" || name == "nc" || name == "np" || name == "nl";
}

}  // namespace

std::string PredParams::to_string() const {
  std::string s;
  for (const auto& n : param_names(kind)) s += (s.empty() ? "" : ",") + n + "=" + std::to_string(values.at(n));
  return s;
}

PredParams initial_params(Kind kind) {
  PredParams p;
  p.kind = kind;
  for (const auto& n : param_names(kind)) p.values[n] = 1;
  return p;
}

TemplateParams initial_params(const Kinding& kinding) {
  TemplateParams out;
  for (const auto& [name, sig] : kinding) out[name] = initial_params(sig.kind);
  return out;
}

void apply_param_overrides(TemplateParams& params, const std::string& spec) {
  std::stringstream entries(spec);
  std::string entry;
  while (std::getline(entries, entry, ';')) {
    entry.erase(0, entry.find_first_not_of(" \t"));
    entry.erase(entry.find_last_not_of(" \t") + 1);
    if (entry.empty()) continue;
    auto colon = entry.find(':');
    if (colon == std::string::npos) throw Error("init-params entry without ':': " + entry);
    std::string target = entry.substr(0, colon);
    std::vector<std::pair<std::string, int>> assigns;
    std::stringstream items(entry.substr(colon + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw Error("init-params item without '=': " + item);
      std::string name = item.substr(0, eq);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      int value = 0;
      try {
        value = std::stoi(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error("init-params value is not an integer: " + item);
      }
      if (value < (is_shape_param(name) ? 1 : 0)) throw Error("init-params value out of range: " + item);
      assigns.emplace_back(name, value);
    }
    bool matched = false;
    for (auto& [pred, pp] : params) {
      bool hit = target == "*" || target == pred || (target == "ord" && pp.kind == Kind::Ord) ||
                 (target == "wf" && pp.kind == Kind::WF) || (target == "fn" && pp.kind == Kind::FN);
      if (!hit) continue;
      matched = true;
      for (const auto& [name, value] : assigns) {
        if (pp.values.count(name)) pp.values[name] = value;
        else if (target == pred) throw Error("parameter " + name + " does not apply to " + pred);
      }
    }
    if (!matched && target != "*" && target != "ord" && target != "wf" && target != "fn")
      throw Error("init-params names unknown predicate " + target);
  }
}

std::string params_to_string(const TemplateParams& params) {
  std::string s;
  for (const auto& [pred, pp] : params) s += (s.empty() ? "" : "; ") + pred + "(" + pp.to_string() + ")";
  return s;
}

// ---------------------------------------------------------------------------
// Template structure

std::string Template::fresh(const std::string& tag) { return pred_ + "!" + tag + "_" + std::to_string(counter_++); }

Template::Affine Template::make_affine(std::size_t n, const std::string& tag) {
  Affine a;
  a.c0 = fresh(tag + "c");
  for (std::size_t k = 0; k < n; ++k) a.coeffs.push_back(fresh(tag + "k"));
  return a;
}

Template::Guard Template::make_guard(std::size_t n, const std::string& tag) {
  Guard g;
  for (std::size_t k = 0; k < n; ++k) g.selectors.push_back(fresh(tag + "s"));
  return g;
}

Template::Conj Template::make_conj(std::size_t n_int, std::size_t n_bool, int atoms, const std::string& tag) {
  Conj c;
  for (int j = 0; j < atoms; ++j) c.atoms.push_back(make_affine(n_int, tag));
  c.guard = make_guard(n_bool, tag);
  return c;
}

Template::Template(std::string pred, PredSignature sig, PredParams params, TemplateOptions options)
    : pred_(std::move(pred)), sig_(std::move(sig)), params_(std::move(params)), options_(options) {
  std::size_t side = sig_.sorts.size();
  if (sig_.kind == Kind::WF) {
    if (side % 2 != 0) throw Error("WF template needs even arity: " + pred_);
    side /= 2;
  } else if (sig_.kind == Kind::FN) {
    if (side == 0) throw Error("FN template needs an output position: " + pred_);
    side -= 1;
  }
  for (std::size_t i = 0; i < side; ++i) (sig_.sorts[i] == Sort::Int ? int_pos_ : bool_pos_).push_back(i);
  const std::size_t ni = int_pos_.size(), nb = bool_pos_.size();
  const auto& p = params_;
  switch (sig_.kind) {
    case Kind::Ord:
      for (int i = 0; i < p["nd"]; ++i) disjuncts_.push_back(make_conj(ni, nb, p["nc"], "d"));
      break;
    case Kind::WF:
      for (int i = 0; i < p["np"]; ++i) {
        Region r;
        r.disc = make_conj(ni, nb, p["nc"], "D");
        for (int k = 0; k < p["nl"]; ++k) r.rank.push_back(make_affine(ni, "r"));
        regions_.push_back(std::move(r));
      }
      break;
    case Kind::FN:
      for (int i = 0; i + 1 < p["nd"]; ++i) discs_.push_back(make_conj(ni, nb, p["nc"], "D"));
      for (int i = 0; i < p["nd"]; ++i) {
        if (sig_.sorts.back() == Sort::Int) exprs_.push_back(make_affine(ni, "e"));
        else outs_.push_back(fresh("o"));
      }
      break;
  }
}

namespace {

// How to read affine pieces, guards and the FN output in one direction
// (ground arguments with unknown coefficients, or the converse).
struct Reader {
  std::function<Term(const Template::Affine&, int side)> affine;
  std::function<Formula(const Template::Guard&, int side)> guard;
  std::function<Formula(std::size_t piece)> output_is;  // FN piece i yields the output
};

Formula conj_formula(const Template::Conj& c, int side, const Reader& rd) {
  std::vector<Formula> parts;
  for (const auto& a : c.atoms) parts.push_back(Formula::atom(Rel::Ge, rd.affine(a, side), Term::int_lit(0)));
  parts.push_back(rd.guard(c.guard, side));
  return Formula::land(std::move(parts));
}

}  // namespace

namespace {

Formula build_body(const Template& t, const std::vector<Template::Conj>& disjuncts,
                   const std::vector<std::pair<Template::Conj, std::vector<Template::Affine>>>& regions,
                   const std::vector<Template::Conj>& discs, std::size_t pieces, bool base_wf, const Reader& rd) {
  switch (t.signature().kind) {
    case Kind::Ord: {
      std::vector<Formula> ds;
      for (const auto& d : disjuncts) ds.push_back(conj_formula(d, 0, rd));
      return Formula::lor(std::move(ds));
    }
    case Kind::WF: {
      const std::size_t np = regions.size();
      std::vector<Formula> dx, dy;
      std::vector<std::vector<Term>> rx(np), ry(np);
      for (const auto& [disc, ranks] : regions) {
        dx.push_back(conj_formula(disc, 0, rd));
        dy.push_back(conj_formula(disc, 1, rd));
      }
      for (std::size_t i = 0; i < np; ++i)
        for (const auto& r : regions[i].second) {
          rx[i].push_back(rd.affine(r, 0));
          ry[i].push_back(rd.affine(r, 1));
        }
      auto zero = Term::int_lit(0);
      auto dec = [&](std::size_t i, std::size_t j) {
        std::vector<Formula> alts;
        for (std::size_t k = 0; k < rx[i].size(); ++k) {
          std::vector<Formula> conj;
          if (!base_wf) conj.push_back(Formula::atom(Rel::Ge, rx[i][k], zero));
          conj.push_back(Formula::atom(Rel::Gt, rx[i][k], ry[j][k]));
          for (std::size_t l = 0; l < k; ++l) {
            Formula geq = Formula::atom(Rel::Ge, rx[i][l], ry[j][l]);
            if (base_wf) conj.push_back(geq);
            else
              conj.push_back(Formula::lor(
                  Formula::land(Formula::atom(Rel::Lt, rx[i][l], zero), Formula::atom(Rel::Lt, ry[j][l], zero)), geq));
          }
          alts.push_back(Formula::land(std::move(conj)));
        }
        return Formula::lor(std::move(alts));
      };
      std::vector<Formula> top;
      if (base_wf) {
        for (std::size_t i = 0; i < np; ++i)
          for (const auto& r : rx[i]) top.push_back(Formula::atom(Rel::Ge, r, zero));
        top.push_back(Formula::lor(dx));
      }
      top.push_back(Formula::lor(dy));
      std::vector<Formula> choice;
      for (std::size_t i = 0; i < np; ++i) {
        std::vector<Formula> conj{dx[i]};
        for (std::size_t j = 0; j < np; ++j) conj.push_back(Formula::implies(dy[j], dec(i, j)));
        choice.push_back(Formula::land(std::move(conj)));
      }
      top.push_back(Formula::lor(std::move(choice)));
      return Formula::land(std::move(top));
    }
    case Kind::FN: {
      std::vector<Formula> ds;
      for (const auto& d : discs) ds.push_back(conj_formula(d, 0, rd));
      std::vector<Formula> branches;
      for (std::size_t i = 0; i < pieces; ++i) {
        std::vector<Formula> conj;
        for (std::size_t j = 0; j < i && j < ds.size(); ++j) conj.push_back(Formula::lnot(ds[j]));
        if (i < ds.size()) conj.push_back(ds[i]);
        conj.push_back(rd.output_is(i));
        branches.push_back(Formula::land(std::move(conj)));
      }
      return Formula::lor(std::move(branches));
    }
  }
  return Formula::top();
}

}  // namespace

Formula Template::apply(const std::vector<Value>& args) const {
  if (args.size() != sig_.sorts.size()) throw Error("template arity mismatch for " + pred_);
  const std::size_t half = sig_.kind == Kind::WF ? sig_.sorts.size() / 2 : 0;
  Reader rd;
  rd.affine = [&](const Affine& a, int side) {
    std::size_t off = side ? half : 0;
    Term t = Term::var(a.c0);
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
      const Integer& v = args[off + int_pos_[k]].as_int();
      if (v != 0) t = Term::add(t, Term::scale(v, Term::var(a.coeffs[k])));
    }
    return t;
  };
  rd.guard = [&](const Guard& g, int side) {
    std::size_t off = side ? half : 0;
    std::vector<Formula> parts;
    for (std::size_t k = 0; k < g.selectors.size(); ++k) {
      bool b = args[off + bool_pos_[k]].as_bool();
      parts.push_back(Formula::atom(b ? Rel::Ge : Rel::Le, Term::var(g.selectors[k]), Term::int_lit(0)));
    }
    return Formula::land(std::move(parts));
  };
  rd.output_is = [&](std::size_t i) {
    const Value& out = args.back();
    if (out.sort() == Sort::Int) return Formula::atom(Rel::Eq, rd.affine(exprs_[i], 0), Term::int_lit(out.as_int()));
    return Formula::atom(out.as_bool() ? Rel::Ge : Rel::Le, Term::var(outs_[i]), Term::int_lit(out.as_bool() ? 1 : 0));
  };
  std::vector<std::pair<Conj, std::vector<Affine>>> regions;
  for (const auto& r : regions_) regions.emplace_back(r.disc, r.rank);
  std::size_t pieces = sig_.kind == Kind::FN ? static_cast<std::size_t>(params_["nd"]) : 0;
  return simplify(build_body(*this, disjuncts_, regions, discs_, pieces, options_.base_wf_family, rd));
}

namespace {

std::string abs_name(const std::string& c) { return c + "!abs"; }

}  // namespace

std::vector<LabeledFormula> Template::bounds() const {
  std::map<std::string, std::vector<Formula>> by_param;
  auto bound = [&](const Affine& a, const std::string& coeff_param, const std::string& const_param) {
    Integer cb = params_[coeff_param], db = params_[const_param];
    if (!a.coeffs.empty()) {
      Term sum = Term::var(abs_name(a.coeffs[0]));
      for (std::size_t k = 1; k < a.coeffs.size(); ++k) sum = Term::add(sum, Term::var(abs_name(a.coeffs[k])));
      by_param[coeff_param].push_back(Formula::atom(Rel::Le, sum, Term::int_lit(cb)));
    }
    by_param[const_param].push_back(Formula::atom(Rel::Le, Term::var(a.c0), Term::int_lit(db)));
    by_param[const_param].push_back(Formula::atom(Rel::Ge, Term::var(a.c0), Term::int_lit(-db)));
  };
  for (const auto& d : disjuncts_)
    for (const auto& a : d.atoms) bound(a, "ac", "ad");
  for (const auto& r : regions_) {
    for (const auto& a : r.disc.atoms) bound(a, "dc", "dd");
    for (const auto& a : r.rank) bound(a, "rc", "rd");
  }
  for (const auto& d : discs_)
    for (const auto& a : d.atoms) bound(a, "dc", "dd");
  for (const auto& e : exprs_) bound(e, "ec", "ed");
  std::vector<LabeledFormula> out;
  for (auto& [param, fs] : by_param) out.emplace_back("tpl_" + pred_ + "_" + param, Formula::land(std::move(fs)));
  return out;
}

std::vector<Formula> Template::domains() const {
  std::vector<Formula> out;
  auto affine = [&](const Affine& a) {
    for (const auto& c : a.coeffs) {
      Term aux = Term::var(abs_name(c)), v = Term::var(c);
      out.push_back(Formula::atom(Rel::Ge, aux, v));
      out.push_back(Formula::atom(Rel::Ge, aux, Term::neg(v)));
    }
  };
  auto guard = [&](const Guard& g) {
    for (const auto& s : g.selectors) {
      out.push_back(Formula::atom(Rel::Ge, Term::var(s), Term::int_lit(-1)));
      out.push_back(Formula::atom(Rel::Le, Term::var(s), Term::int_lit(1)));
    }
  };
  auto conj = [&](const Conj& c) {
    for (const auto& a : c.atoms) affine(a);
    guard(c.guard);
  };
  for (const auto& d : disjuncts_) conj(d);
  for (const auto& r : regions_) {
    conj(r.disc);
    for (const auto& a : r.rank) affine(a);
  }
  for (const auto& d : discs_) conj(d);
  for (const auto& e : exprs_) affine(e);
  for (const auto& o : outs_) {
    out.push_back(Formula::atom(Rel::Ge, Term::var(o), Term::int_lit(0)));
    out.push_back(Formula::atom(Rel::Le, Term::var(o), Term::int_lit(1)));
  }
  return out;
}

std::vector<std::string> Template::unknowns() const {
  std::vector<std::string> out;
  auto affine = [&](const Affine& a) {
    out.push_back(a.c0);
    out.insert(out.end(), a.coeffs.begin(), a.coeffs.end());
  };
  auto conj = [&](const Conj& c) {
    for (const auto& a : c.atoms) affine(a);
    out.insert(out.end(), c.guard.selectors.begin(), c.guard.selectors.end());
  };
  for (const auto& d : disjuncts_) conj(d);
  for (const auto& r : regions_) {
    conj(r.disc);
    for (const auto& a : r.rank) affine(a);
  }
  for (const auto& d : discs_) conj(d);
  for (const auto& e : exprs_) affine(e);
  out.insert(out.end(), outs_.begin(), outs_.end());
  return out;
}

Assignment Template::sample(std::mt19937_64& rng) const {
  Assignment out;
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto affine = [&](const Affine& a, const std::string& cp, const std::string& dp) {
    int budget = params_[cp], db = params_[dp];
    out[a.c0] = Value::of_int(uniform(-db, db));
    std::vector<std::size_t> order(a.coeffs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k : order) {
      int c = uniform(-budget, budget);
      budget -= c < 0 ? -c : c;
      out[a.coeffs[k]] = Value::of_int(c);
      out[abs_name(a.coeffs[k])] = Value::of_int(c < 0 ? -c : c);
    }
  };
  auto conj = [&](const Conj& c, const std::string& cp, const std::string& dp) {
    for (const auto& a : c.atoms) affine(a, cp, dp);
    for (const auto& sel : c.guard.selectors) out[sel] = Value::of_int(uniform(-1, 1));
  };
  for (const auto& d : disjuncts_) conj(d, "ac", "ad");
  for (const auto& r : regions_) {
    conj(r.disc, "dc", "dd");
    for (const auto& a : r.rank) affine(a, "rc", "rd");
  }
  for (const auto& d : discs_) conj(d, "dc", "dd");
  for (const auto& e : exprs_) affine(e, "ec", "ed");
  for (const auto& o : outs_) out[o] = Value::of_int(uniform(0, 1));
  return out;
}

PredicateDefinition Template::extract(const Assignment& model) const {
  const std::size_t n = sig_.sorts.size();
  PredicateDefinition def;
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sig_.kind == Kind::WF) names[i] = (i < n / 2 ? "x" : "y") + std::to_string(i % (n / 2) + 1);
    else if (sig_.kind == Kind::FN && i + 1 == n) names[i] = "r";
    else names[i] = "x" + std::to_string(i + 1);
    def.params.emplace_back(names[i], sig_.sorts[i]);
  }
  auto value = [&](const std::string& u) -> Integer {
    auto it = model.find(u);
    return it == model.end() ? Integer(0) : it->second.as_int();
  };
  const std::size_t half = sig_.kind == Kind::WF ? n / 2 : 0;
  Reader rd;
  rd.affine = [&](const Affine& a, int side) {
    LinearExpr e;
    e.constant = value(a.c0);
    std::size_t off = side ? half : 0;
    for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
      Integer c = value(a.coeffs[k]);
      if (c != 0) e.coeffs[names[off + int_pos_[k]]] += c;
    }
    return to_term(e);
  };
  rd.guard = [&](const Guard& g, int side) {
    std::size_t off = side ? half : 0;
    std::vector<Formula> parts;
    for (std::size_t k = 0; k < g.selectors.size(); ++k) {
      Integer s = value(g.selectors[k]);
      Formula b = Formula::bool_var(names[off + bool_pos_[k]]);
      if (s > 0) parts.push_back(b);
      else if (s < 0) parts.push_back(Formula::lnot(b));
    }
    return Formula::land(std::move(parts));
  };
  rd.output_is = [&](std::size_t i) {
    if (sig_.sorts.back() == Sort::Int) return Formula::atom(Rel::Eq, Term::var(names.back()), rd.affine(exprs_[i], 0));
    Formula b = Formula::bool_var(names.back());
    return value(outs_[i]) > 0 ? b : Formula::lnot(b);
  };
  std::vector<std::pair<Conj, std::vector<Affine>>> regions;
  for (const auto& r : regions_) regions.emplace_back(r.disc, r.rank);
  std::size_t pieces = sig_.kind == Kind::FN ? static_cast<std::size_t>(params_["nd"]) : 0;
  def.body = simplify(build_body(*this, disjuncts_, regions, discs_, pieces, options_.base_wf_family, rd));
  return def;
}

// ---------------------------------------------------------------------------
// Synthesis

SynthesisResult synthesize(const std::vector<ExampleInstance>& examples, const Kinding& kinding,
                           const TemplateParams& params, SmtSession& session, const TemplateOptions& options,
                           std::optional<int> timeout_ms) {
  std::map<std::string, Template> templates;
  for (const auto& [pred, sig] : kinding) {
    auto it = params.find(pred);
    PredParams pp = it != params.end() ? it->second : initial_params(sig.kind);
    templates.emplace(pred, Template(pred, sig, pp, options));
  }
  auto tpl = [&](const std::string& pred) -> const Template& {
    auto it = templates.find(pred);
    if (it == templates.end()) throw Error("example mentions predicate without kinding: " + pred);
    return it->second;
  };

  std::vector<LabeledFormula> assertions;
  std::map<std::string, std::size_t> example_of_label;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (ex.trivially_true) continue;
    std::vector<Formula> lits;
    for (const auto& a : ex.positive) lits.push_back(tpl(a.pred).apply(a.args));
    for (const auto& a : ex.negative) lits.push_back(Formula::lnot(tpl(a.pred).apply(a.args)));
    std::string label = "ex_" + std::to_string(i);
    example_of_label[label] = i;
    assertions.emplace_back(label, Formula::lor(std::move(lits)));
  }
  for (const auto& [pred, t] : templates) {
    for (auto& b : t.bounds()) assertions.push_back(std::move(b));
    for (auto& d : t.domains()) assertions.emplace_back("", std::move(d));
  }

  SynthesisResult result;
  SmtResult r = session.check(assertions, true, true, timeout_ms);
  if (r.sat()) {
    result.status = SynthesisResult::Status::Found;
    for (const auto& [pred, t] : templates) result.candidate[pred] = t.extract(r.model);
    return result;
  }
  auto implicate_example = [&](std::size_t i) {
    for (const auto& a : examples[i].positive) result.implicated.insert(a.pred);
    for (const auto& a : examples[i].negative) result.implicated.insert(a.pred);
  };
  if (r.unknown()) {
    session.restart();
    result.status = SynthesisResult::Status::Unknown;
    for (std::size_t i = 0; i < examples.size(); ++i) implicate_example(i);
    return result;
  }
  result.status = SynthesisResult::Status::NoCandidate;
  result.core = r.core;
  for (const auto& label : r.core) {
    if (auto it = example_of_label.find(label); it != example_of_label.end()) {
      implicate_example(it->second);
    } else if (label.rfind("tpl_", 0) == 0) {
      std::string rest = label.substr(4);
      std::string pred = rest.substr(0, rest.rfind('_'));
      if (templates.count(pred)) result.implicated.insert(pred);
    }
  }
  return result;
}

TemplateParams update_params(const TemplateParams& params, const std::set<std::string>& implicated, int delta) {
  TemplateParams out = params;
  for (const auto& pred : implicated) {
    auto it = out.find(pred);
    if (it == out.end()) continue;
    PredParams& pp = it->second;
    const auto& rotation = param_rotation(pp.kind);
    std::string pick;
    for (const auto& name : rotation) {
      int peak = 0;
      for (const auto& [other, op] : params)
        if (op.kind == pp.kind) peak = std::max(peak, op.values.at(name));
      if (pp.values[name] + delta < peak) {
        pick = name;
        break;
      }
    }
    if (pick.empty()) {
      pick = rotation[pp.rotation % rotation.size()];
      ++pp.rotation;
    }
    ++pp.values[pick];
  }
  return out;
}

}  // namespace pfw
