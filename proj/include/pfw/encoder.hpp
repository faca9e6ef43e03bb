#pragma once

// Reductions of relational verification problems over symbolic transition
// systems to pfwCSP.
//
// Naming: variable v of system i becomes v<i>; its k-th successor copy adds k
// primes (x1', x2''). Constants are never primed. Introduced term variables
// are d (step difference), b (bound) and p_<v> (prophecy for v of system 1).
// Predicate arguments are ordered d, b, prophecies, system 1, system 2, ...

#include <optional>
#include <string>
#include <vector>

#include "pfw/ir.hpp"
#include "pfw/smt.hpp"
#include "pfw/system.hpp"

namespace pfw {

enum class RelationalKind { KSafety, CoTermination, TIGNI, TSGNI };

std::string_view to_string(RelationalKind kind);
std::optional<RelationalKind> parse_relational_kind(std::string_view text);

struct RelationalProblem {
  RelationalKind kind = RelationalKind::KSafety;
  std::vector<TransitionSystem> systems;
  Formula pre;                  // over copy names; may apply user predicates
  std::optional<Formula> post;  // absent for co-termination
  Kinding user_preds;           // predicates applied in pre/post
};

struct EncoderOptions {
  /// Co-termination: add the role-swapped well-foundedness clause.
  bool symmetric = false;
  /// GNI: system-1 variables that get prophecy copies (default: all).
  std::optional<std::vector<std::string>> prophecy;
  /// GNI: use F1 /\ p = x1 in every clause mentioning F1, not only where the
  /// prophecy check is essential.
  bool prophecy_final_everywhere = false;
  /// Co-termination kinds: base variable names passed to the bound predicate
  /// (default: every state argument).
  std::optional<std::vector<std::string>> bound_args;
};

struct EncodingArtifacts {
  std::string inv;
  std::vector<std::string> sch;  // one per nonempty subset, in emission order
  std::string fnbnd;
  std::vector<std::string> fnr;
  std::vector<std::string> wfr;
  std::string d, b;
  std::vector<std::string> prophecy;
};

struct Encoding {
  PfwCsp problem;
  EncodingArtifacts artifacts;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

/// Sorts of every name an encoding may mention in pre/post: copies of system
/// variables (with primes up to the successor count, at least one), d, b and
/// prophecy variables. Used to parse pre/post text.
VarSet encoding_vocabulary(const RelationalProblem& problem, const EncoderOptions& options = {});

Encoding encode(const RelationalProblem& problem, const EncoderOptions& options = {});

PfwCsp encode_ksafety(const RelationalProblem& problem);
PfwCsp encode_coterm(const RelationalProblem& problem, bool symmetric = false);
PfwCsp encode_tigni(const RelationalProblem& problem, const EncoderOptions& options = {});
PfwCsp encode_tsgni(const RelationalProblem& problem, const EncoderOptions& options = {});

/// Union of clause sets; hint atoms must agree with the kinding.
PfwCsp add_hints(const PfwCsp& problem, const std::vector<Clause>& hints);

struct LintIssue {
  std::size_t system = 0;  // 1-based
  std::string check;       // final-self-loop, choice-functional, choice-sound, choice-total
  std::string message;
};

/// SMT side-condition checks on the systems of a problem. Unknown answers
/// are reported as issues too.
std::vector<LintIssue> lint(const RelationalProblem& problem, SmtSession& session);

std::string copy_name(const std::string& var, std::size_t copy, int primes = 0);

}  // namespace pfw
