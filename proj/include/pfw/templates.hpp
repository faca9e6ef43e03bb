#pragma once

// Stratified template families for Ord, WF and FN predicate variables,
// grounded synthesis queries and core-guided parameter growth.

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pfw/ir.hpp"
#include "pfw/smt.hpp"

namespace pfw {

/// Parameter vector of one predicate variable, keyed by parameter name.
struct PredParams {
  Kind kind = Kind::Ord;
  std::map<std::string, int> values;
  std::size_t rotation = 0;  // next position in the kind's rotation

  int operator[](const std::string& name) const { return values.at(name); }
  std::string to_string() const;
};

using TemplateParams = std::map<std::string, PredParams>;

/// Ord: nd nc ac ad.  WF: np nl nc rc rd dc dd.  FN: nd nc dc dd ec ed.
const std::vector<std::string>& param_names(Kind kind);
/// Order in which update_params bumps parameters.
const std::vector<std::string>& param_rotation(Kind kind);

PredParams initial_params(Kind kind);
TemplateParams initial_params(const Kinding& kinding);

/// "target:name=v,name=v;target:..." with target a predicate name, a kind
/// (ord, wf, fn) or '*'. Later entries override earlier ones.
void apply_param_overrides(TemplateParams& params, const std::string& spec);

std::string params_to_string(const TemplateParams& params);

struct TemplateOptions {
  bool base_wf_family = false;  // unrefined WF family, for differential tests
};

/// A template instantiated at fixed parameters. Coefficients are unknown
/// integer variables; applying the template to constant arguments gives a
/// linear formula over those unknowns.
class Template {
 public:
  Template(std::string pred, PredSignature sig, PredParams params, TemplateOptions options = {});

  const std::string& pred() const { return pred_; }
  const PredSignature& signature() const { return sig_; }
  const PredParams& params() const { return params_; }

  /// The template body at ground arguments.
  Formula apply(const std::vector<Value>& args) const;
  /// Bound constraints, labelled tpl_<pred>_<param>.
  std::vector<LabeledFormula> bounds() const;
  /// Ranges of Boolean selectors and |c| auxiliaries (unlabelled).
  std::vector<Formula> domains() const;
  /// Unknowns missing from the model default to 0.
  PredicateDefinition extract(const Assignment& model) const;
  /// Every unknown name (coefficients and selectors; not auxiliaries).
  std::vector<std::string> unknowns() const;
  /// A random assignment to the unknowns (and auxiliaries) satisfying
  /// bounds() and domains().
  Assignment sample(std::mt19937_64& rng) const;

  struct Affine {
    std::string c0;
    std::vector<std::string> coeffs;  // one per Int position of the side
  };
  struct Guard {
    std::vector<std::string> selectors;  // one per Bool position, in {-1,0,1}
  };
  struct Conj {
    std::vector<Affine> atoms;  // each atom >= 0
    Guard guard;
  };

 private:
  std::string fresh(const std::string& tag);
  Affine make_affine(std::size_t n, const std::string& tag);
  Guard make_guard(std::size_t n, const std::string& tag);
  Conj make_conj(std::size_t n_int, std::size_t n_bool, int atoms, const std::string& tag);

  std::string pred_;
  PredSignature sig_;
  PredParams params_;
  TemplateOptions options_;
  std::size_t counter_ = 0;

  // positions of Int/Bool arguments within a side (WF: within one half;
  // FN: within the inputs)
  std::vector<std::size_t> int_pos_, bool_pos_;

  // Ord
  std::vector<Conj> disjuncts_;
  // WF
  struct Region {
    Conj disc;
    std::vector<Affine> rank;
  };
  std::vector<Region> regions_;
  // FN
  std::vector<Conj> discs_;          // nd - 1
  std::vector<Affine> exprs_;        // nd, Int output
  std::vector<std::string> outs_;    // nd, Bool output selectors in {0,1}
};

struct SynthesisResult {
  enum class Status { Found, NoCandidate, Unknown };
  Status status = Status::NoCandidate;
  Candidate candidate;
  std::set<std::string> core;        // labels
  std::set<std::string> implicated;  // predicate variables behind the core
};

/// One SMT query: all templates at `params` must satisfy all examples.
SynthesisResult synthesize(const std::vector<ExampleInstance>& examples, const Kinding& kinding,
                           const TemplateParams& params, SmtSession& session,
                           const TemplateOptions& options = {}, std::optional<int> timeout_ms = std::nullopt);

/// Core-guided growth: one rotation step per implicated predicate, with a
/// catch-up rule for parameters lagging their peers by more than `delta`.
TemplateParams update_params(const TemplateParams& params, const std::set<std::string>& implicated, int delta = 2);

}  // namespace pfw
