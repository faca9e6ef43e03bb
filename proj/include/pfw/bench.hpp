#pragma once

// Benchmark runner: a directory of .pfw files, optional per-file sidecars,
// a bounded worker pool and a Table-style report.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfw/cegis.hpp"

namespace pfw {

/// Settings that can come from the command line, a sidecar or defaults.
/// Unset fields fall through to the next source.
struct RunOverrides {
  std::optional<double> timeout_s;
  std::optional<std::string> init_params;
  std::optional<bool> resolution;
  std::optional<int> query_timeout_ms;
};

/// Reads NAME.json next to NAME.pfw: {"timeout": S, "init_params": SPEC,
/// "resolution": B, "query_timeout_ms": MS, "note": TEXT}.
RunOverrides read_sidecar(const std::filesystem::path& file);

/// CLI > sidecar > built-in.
SolveConfig resolve_config(const SolveConfig& base, const RunOverrides& sidecar, const RunOverrides& cli);

struct BenchEntry {
  std::string name;  // file stem without the .hint suffix
  std::filesystem::path file;
  bool hinted = false;
};

/// Every NAME.pfw in dir, sorted by name. With prefer_hints a sibling
/// NAME.hint.pfw replaces NAME.pfw; without it hint files are skipped.
std::vector<BenchEntry> discover(const std::filesystem::path& dir, bool prefer_hints = true);

struct ReferenceRow {
  double time_s = 0;
  int iterations = 0;
  bool solved = true;
  bool hinted = false;
  bool manual_params = false;
};

/// {"NAME": {"time_s": .., "iterations": .., "solved": .., "hinted": .., "manual_params": ..}}
std::map<std::string, ReferenceRow> read_reference(const std::filesystem::path& file);

struct BenchRow {
  std::string name;
  std::string file;
  bool hinted = false;
  std::string outcome;  // solved, unsat, timeout, error
  double elapsed_s = 0;
  std::size_t iterations = 0;
  std::string params;
  std::string solution;
  std::string error;
  std::optional<ReferenceRow> reference;
  std::optional<bool> agrees;  // solved/unsolved agreement with the reference
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string solver;  // path and version line
  double timeout_s = 0;
};

struct BenchConfig {
  SolveConfig base;
  RunOverrides cli;
  int jobs = 1;
  bool prefer_hints = true;
  std::optional<std::filesystem::path> reference;
};

BenchRow run_one(const BenchEntry& entry, const BenchConfig& config);
BenchReport run_bench(const std::filesystem::path& dir, const BenchConfig& config);

nlohmann::json to_json(const BenchRow& row);
nlohmann::json to_json(const BenchReport& report);
BenchReport report_from_json(const nlohmann::json& j);

/// Columns: Program, Time (s), #Iters, Outcome, and Ref/Agree when a
/// reference is present; closed by a totals line.
std::string render_table(const BenchReport& report);

/// First line of `solver -version`, or "unknown".
std::string solver_version(const std::string& path);

}  // namespace pfw
