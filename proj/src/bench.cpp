#include "pfw/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "pfw/parser.hpp"
#include "pfw/printer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pfw {

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

RunOverrides read_sidecar(const fs::path& file) {
  fs::path side = file;
  std::string stem = side.stem().string();
  side.replace_filename(stem + ".json");
  RunOverrides o;
  if (!fs::exists(side)) return o;
  json j;
  try {
    j = json::parse(slurp(side));
  } catch (const json::exception& e) {
    throw Error(side.string() + ": " + e.what());
  }
  o.timeout_s = opt<double>(j, "timeout");
  o.init_params = opt<std::string>(j, "init_params");
  o.resolution = opt<bool>(j, "resolution");
  o.query_timeout_ms = opt<int>(j, "query_timeout_ms");
  return o;
}

SolveConfig resolve_config(const SolveConfig& base, const RunOverrides& sidecar, const RunOverrides& cli) {
  SolveConfig c = base;
  for (const RunOverrides* o : {&sidecar, &cli}) {
    if (o->timeout_s) c.timeout_s = *o->timeout_s;
    if (o->init_params) c.init_params = *o->init_params;
    if (o->resolution) c.resolution = *o->resolution;
    if (o->query_timeout_ms) c.synthesis_timeout_ms = c.validation_timeout_ms = *o->query_timeout_ms;
  }
  if (!(c.timeout_s > 0)) throw Error("timeout must be positive");
  return c;
}

std::vector<BenchEntry> discover(const fs::path& dir, bool prefer_hints) {
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  std::map<std::string, BenchEntry> plain, hinted;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".pfw") continue;
    std::string stem = e.path().stem().string();
    const std::string suffix = ".hint";
    if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
      std::string name = stem.substr(0, stem.size() - suffix.size());
      hinted[name] = {name, e.path(), true};
    } else {
      plain[stem] = {stem, e.path(), false};
    }
  }
  std::map<std::string, BenchEntry> chosen = plain;
  if (prefer_hints)
    for (const auto& [n, e] : hinted) chosen[n] = e;
  std::vector<BenchEntry> out;
  for (auto& [n, e] : chosen) out.push_back(e);
  return out;
}

std::map<std::string, ReferenceRow> read_reference(const fs::path& file) {
  std::map<std::string, ReferenceRow> out;
  json j = json::parse(slurp(file));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& r = it.value();
    ReferenceRow row;
    row.time_s = r.value("time_s", 0.0);
    row.iterations = r.value("iterations", 0);
    row.solved = r.value("solved", true);
    row.hinted = r.value("hinted", false);
    row.manual_params = r.value("manual_params", false);
    out[it.key()] = row;
  }
  return out;
}

BenchRow run_one(const BenchEntry& entry, const BenchConfig& config) {
  BenchRow row;
  row.name = entry.name;
  row.file = entry.file.string();
  row.hinted = entry.hinted;
  try {
    SolveConfig c = resolve_config(config.base, read_sidecar(entry.file), config.cli);
    c.on_event = nullptr;
    PfwCsp problem = parse_pfwcsp(slurp(entry.file));
    SolveOutcome o = solve(problem, c);
    row.outcome = std::string(to_string(o.kind));
    row.elapsed_s = o.elapsed_s;
    row.iterations = o.iterations;
    row.params = params_to_string(o.params);
    if (o.kind == SolveOutcome::Kind::Solution) row.solution = print_candidate(o.candidate);
  } catch (const std::exception& e) {
    row.outcome = "error";
    row.error = e.what();
  }
  return row;
}

BenchReport run_bench(const fs::path& dir, const BenchConfig& config) {
  BenchReport report;
  report.solver = config.base.smt.solver_path + " (" + solver_version(config.base.smt.solver_path) + ")";
  report.timeout_s = config.cli.timeout_s.value_or(config.base.timeout_s);
  auto entries = discover(dir, config.prefer_hints);
  std::map<std::string, ReferenceRow> ref;
  if (config.reference) ref = read_reference(*config.reference);

  report.rows.resize(entries.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < entries.size();) {
      BenchRow row = run_one(entries[i], config);
      std::lock_guard<std::mutex> lock(mu);
      report.rows[i] = std::move(row);
    }
  };
  std::size_t n = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(1, config.jobs)), entries.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (auto& row : report.rows) {
    auto it = ref.find(row.name);
    if (it == ref.end()) continue;
    row.reference = it->second;
    row.agrees = (row.outcome == "solved") == it->second.solved;
  }
  return report;
}

json to_json(const BenchRow& row) {
  json j{{"name", row.name},        {"file", row.file},         {"hinted", row.hinted},
         {"outcome", row.outcome},  {"elapsed_s", row.elapsed_s}, {"iterations", row.iterations},
         {"params", row.params},    {"solution", row.solution},   {"error", row.error}};
  if (row.reference) {
    const auto& r = *row.reference;
    j["reference"] = {{"time_s", r.time_s}, {"iterations", r.iterations}, {"solved", r.solved},
                      {"hinted", r.hinted}, {"manual_params", r.manual_params}};
  } else {
    j["reference"] = nullptr;
  }
  j["agrees"] = row.agrees ? json(*row.agrees) : json(nullptr);
  return j;
}

json to_json(const BenchReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(to_json(r));
  return {{"solver", report.solver}, {"timeout_s", report.timeout_s}, {"rows", rows}};
}

BenchReport report_from_json(const json& j) {
  BenchReport rep;
  rep.solver = j.at("solver").get<std::string>();
  rep.timeout_s = j.at("timeout_s").get<double>();
  for (const auto& r : j.at("rows")) {
    BenchRow row;
    row.name = r.at("name").get<std::string>();
    row.file = r.at("file").get<std::string>();
    row.hinted = r.at("hinted").get<bool>();
    row.outcome = r.at("outcome").get<std::string>();
    row.elapsed_s = r.at("elapsed_s").get<double>();
    row.iterations = r.at("iterations").get<std::size_t>();
    row.params = r.at("params").get<std::string>();
    row.solution = r.at("solution").get<std::string>();
    row.error = r.at("error").get<std::string>();
    if (!r.at("reference").is_null()) {
      const auto& x = r.at("reference");
      row.reference = ReferenceRow{x.at("time_s").get<double>(), x.at("iterations").get<int>(), x.at("solved").get<bool>(),
                                   x.at("hinted").get<bool>(), x.at("manual_params").get<bool>()};
    }
    if (!r.at("agrees").is_null()) row.agrees = r.at("agrees").get<bool>();
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string render_table(const BenchReport& report) {
  bool with_ref = std::any_of(report.rows.begin(), report.rows.end(), [](const BenchRow& r) { return r.reference.has_value(); });
  std::size_t w = 8;
  for (const auto& r : report.rows) w = std::max(w, r.name.size() + (r.hinted ? 2 : 0));
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(w)) << "Program" << "  " << std::right << std::setw(9) << "Time (s)"
      << "  " << std::setw(7) << "#Iters" << "  " << std::left << std::setw(8) << "Outcome";
  if (with_ref) out << "  " << std::right << std::setw(14) << "Ref (s/it)" << "  Agree";
  out << "\n";
  std::map<std::string, std::size_t> totals;
  std::size_t agree = 0, compared = 0;
  for (const auto& r : report.rows) {
    ++totals[r.outcome];
    std::string name = r.name + (r.hinted ? " +" : "");
    out << std::left << std::setw(static_cast<int>(w)) << name << "  " << std::right << std::setw(9) << std::fixed
        << std::setprecision(3) << r.elapsed_s << "  " << std::setw(7) << r.iterations << "  " << std::left
        << std::setw(8) << r.outcome;
    if (with_ref) {
      if (r.reference) {
        std::ostringstream p;
        p << std::fixed << std::setprecision(3) << r.reference->time_s << "/" << r.reference->iterations;
        out << "  " << std::right << std::setw(14) << p.str() << "  " << (*r.agrees ? "yes" : "no");
        ++compared;
        agree += *r.agrees;
      } else {
        out << "  " << std::right << std::setw(14) << "-" << "  -";
      }
    }
    out << "\n";
  }
  out << "total " << report.rows.size() << ": solved " << totals["solved"] << ", unsat " << totals["unsat"]
      << ", timeout " << totals["timeout"] << ", error " << totals["error"];
  if (with_ref) out << "; agreement " << agree << "/" << compared;
  out << "\n";
  for (const auto& r : report.rows)
    if (!r.error.empty()) out << r.name << ": " << r.error << "\n";
  return out.str();
}

std::string solver_version(const std::string& path) {
  std::string cmd = "'" + path + "' -version 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return "unknown";
  char buf[256];
  std::string line;
  if (fgets(buf, sizeof buf, f)) line = buf;
  pclose(f);
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return line.empty() ? "unknown" : line;
}

}  // namespace pfw
