#pragma once

// SMT-LIB2 session with an external solver process.

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pfw/ir.hpp"

namespace pfw {

class SmtError : public Error {
 public:
  using Error::Error;
};

/// Solver path from $PFW_SMT_SOLVER, else "z3".
std::string default_solver_path();

struct SmtConfig {
  std::string solver_path = default_solver_path();
  std::vector<std::string> solver_args = {"-in", "-smt2"};
  std::string logic = "ALL";
  int timeout_ms = 10000;
  bool minimize_cores = true;
};

struct SmtResult {
  enum class Status { Sat, Unsat, Unknown };
  Status status = Status::Unknown;
  Assignment model;                // Sat only
  std::set<std::string> defaulted;  // model entries filled with sort defaults
  std::set<std::string> core;       // Unsat with need_core
  std::string reason;               // Unknown

  bool sat() const { return status == Status::Sat; }
  bool unsat() const { return status == Status::Unsat; }
  bool unknown() const { return status == Status::Unknown; }
};

std::string smt_symbol(const std::string& name);
std::string lower(const Term& t);
std::string lower(const Formula& f);

using LabeledFormula = std::pair<std::string, Formula>;

class SmtSession {
 public:
  explicit SmtSession(SmtConfig config = {});
  ~SmtSession();
  SmtSession(const SmtSession&) = delete;
  SmtSession& operator=(const SmtSession&) = delete;

  /// One push/pop framed query. Non-empty labels must be unique when
  /// need_core is set; empty labels stay unnamed.
  /// Sat models are checked against the assertions by local evaluation.
  SmtResult check(const std::vector<LabeledFormula>& assertions, bool need_model, bool need_core,
                  std::optional<int> timeout_ms = std::nullopt);

  /// Satisfiability of raw SMT-LIB assertions (e.g. quantified ones) over
  /// the declared constants. No model or core.
  SmtResult check_script(const VarSet& decls, const std::vector<std::string>& assertions,
                         std::optional<int> timeout_ms = std::nullopt);

  /// Kills the solver; the next query starts a fresh process.
  void restart();

  const SmtConfig& config() const { return config_; }
  std::size_t queries() const { return queries_; }

 private:
  void start();
  void stop();
  void send(const std::string& text);
  std::string read_sexpr(std::chrono::steady_clock::time_point deadline);

  SmtConfig config_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::size_t queries_ = 0;
};

}  // namespace pfw
