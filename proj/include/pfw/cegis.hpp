#pragma once

// Stratified CEGIS over template families: synthesis on ground examples,
// SMT validation with counterexample extraction, and a resolution phase.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pfw/ir.hpp"
#include "pfw/smt.hpp"
#include "pfw/templates.hpp"

namespace pfw {

struct Violation {
  std::size_t clause = 0;
  Assignment theta;  // over ftv(clause)
  ExampleInstance instance;
};

struct ValidationResult {
  bool valid = true;
  std::vector<Violation> violations;
};

/// Validity of sigma(c) for every clause. Throws MissingDefinition when sigma
/// does not cover a predicate and SmtError when the backend cannot decide.
ValidationResult validate(const Candidate& sigma, const PfwCsp& problem, SmtSession& session,
                          std::optional<int> timeout_ms = std::nullopt);

struct ResolutionConfig {
  std::size_t max_new = 200;
  std::size_t max_queries = 200;
};

/// Pairs (clause index, atom position, unit) already grounded; kept across
/// iterations so one pair is never queried twice.
using ResolutionMemo = std::set<std::tuple<std::size_t, std::size_t, std::string>>;

/// Unit propagation over the examples, then one round of resolution between
/// the input clauses and the unit facts. Returns instances not in `examples`.
std::vector<ExampleInstance> resolution_expand(const std::vector<ExampleInstance>& examples, const PfwCsp& problem,
                                               SmtSession& session, const ResolutionConfig& config = {},
                                               ResolutionMemo* memo = nullptr);

struct SolveEvent {
  std::size_t iteration = 0;
  std::string phase;  // synthesis, grow, validation, resolution, unsat-check, done
  double elapsed_s = 0;
  std::size_t examples = 0;
  std::string params;
  std::string detail;
};

struct SolveConfig {
  double timeout_s = 600;
  SmtConfig smt;
  int synthesis_timeout_ms = 20000;
  int validation_timeout_ms = 20000;
  std::string init_params;  // override spec, see apply_param_overrides
  bool resolution = true;
  ResolutionConfig resolution_limits;
  TemplateOptions templates;
  std::function<void(const SolveEvent&)> on_event;
};

struct SolveStats {
  std::size_t smt_queries = 0;
  std::size_t counterexamples = 0;
  std::size_t resolution_instances = 0;
  std::size_t progress_checks = 0;  // assertions evaluated, all passed
  std::size_t synthesis_unknowns = 0;
};

struct SolveOutcome {
  enum class Kind { Solution, UnsatWitness, Timeout };
  Kind kind = Kind::Timeout;
  Candidate candidate;                   // Solution
  std::vector<ExampleInstance> witness;  // UnsatWitness
  std::size_t iterations = 0;
  double elapsed_s = 0;
  TemplateParams params;
  SolveStats stats;
};

std::string_view to_string(SolveOutcome::Kind kind);

/// Raised when a counterexample or candidate repeats; never expected.
class ProgressViolation : public Error {
 public:
  using Error::Error;
};

SolveOutcome solve(const PfwCsp& problem, const SolveConfig& config = {});

struct DefinitionIssue {
  std::string pred;
  std::string message;
};

/// Every kinded predicate has a definition whose parameters match its
/// signature, and the signature has the shape its kind requires.
std::vector<DefinitionIssue> check_candidate_shape(const Candidate& sigma, const Kinding& kinding);

/// Semantic kind checks for user-supplied definitions: FN entries must be
/// functional and total. With `wf`, WF entries must also be contained in a
/// well-founded relation from the template family (found by a bounded solve).
std::vector<DefinitionIssue> check_definition_kinds(const Candidate& sigma, const Kinding& kinding,
                                                    const SolveConfig& config, bool wf = false);

/// Text form of a substitution used to detect repeated candidates.
std::string fingerprint(const Candidate& sigma);

}  // namespace pfw
