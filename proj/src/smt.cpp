#include "pfw/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "pfw/ir_ops.hpp"

namespace pfw {

std::string default_solver_path() {
  const char* env = std::getenv("PFW_SMT_SOLVER");
  return env && *env ? env : "z3";
}

// ---------------------------------------------------------------------------
// Lowering

namespace {
constexpr int kFollowUpMs = 60000;

bool simple_symbol_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || std::strchr("~!@$%^&*_-+=<>.?/", c) != nullptr;
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {
      "true", "false", "and", "or", "not", "ite", "let", "forall", "exists", "par", "_", "!", "as",
      "assert", "distinct", "Int", "Bool", "NUMERAL", "DECIMAL", "STRING", "BINARY", "HEXADECIMAL",
      "=>", "xor", "div", "mod", "abs", "-", "+", "*", "<=", "<", ">=", ">", "="};
  return words;
}

void lower_int(std::ostream& os, const Integer& v) {
  if (v < 0) os << "(- " << Integer(-v).get_str() << ")";
  else os << v.get_str();
}

void lower_term(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case TermKind::Var: os << smt_symbol(t.name()); return;
    case TermKind::IntLit: lower_int(os, t.value()); return;
    case TermKind::BoolLit: os << (t.bool_value() ? "true" : "false"); return;
    case TermKind::Neg: os << "(- "; lower_term(os, t.lhs()); os << ")"; return;
    case TermKind::Add:
    case TermKind::Sub:
      os << (t.kind() == TermKind::Add ? "(+ " : "(- ");
      lower_term(os, t.lhs());
      os << " ";
      lower_term(os, t.rhs());
      os << ")";
      return;
    case TermKind::Scale:
      os << "(* ";
      lower_int(os, t.value());
      os << " ";
      lower_term(os, t.lhs());
      os << ")";
      return;
  }
}

void lower_formula(std::ostream& os, const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True: os << "true"; return;
    case FormulaKind::False: os << "false"; return;
    case FormulaKind::BoolVar: os << smt_symbol(f.name()); return;
    case FormulaKind::PredApp: throw Error("cannot lower predicate application " + f.name());
    case FormulaKind::Atom: {
      const char* op = "=";
      switch (f.rel()) {
        case Rel::Eq: case Rel::Ne: op = "="; break;
        case Rel::Le: op = "<="; break;
        case Rel::Lt: op = "<"; break;
        case Rel::Ge: op = ">="; break;
        case Rel::Gt: op = ">"; break;
      }
      if (f.rel() == Rel::Ne) os << "(not ";
      os << "(" << op << " ";
      lower_term(os, f.lhs());
      os << " ";
      lower_term(os, f.rhs());
      os << ")";
      if (f.rel() == Rel::Ne) os << ")";
      return;
    }
    case FormulaKind::Not: os << "(not "; lower_formula(os, f.operand()); os << ")"; return;
    case FormulaKind::And:
    case FormulaKind::Or: {
      bool is_and = f.kind() == FormulaKind::And;
      if (f.children().empty()) { os << (is_and ? "true" : "false"); return; }
      if (f.children().size() == 1) { lower_formula(os, f.children()[0]); return; }
      os << (is_and ? "(and" : "(or");
      for (const auto& c : f.children()) {
        os << " ";
        lower_formula(os, c);
      }
      os << ")";
      return;
    }
  }
}

// Minimal s-expression tree for solver responses.
struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_list = false;
};

Sexp parse_sexp(const std::string& s, std::size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  Sexp out;
  if (i >= s.size()) throw SmtError("protocol error: truncated response");
  if (s[i] == '(') {
    out.is_list = true;
    ++i;
    for (;;) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size()) throw SmtError("protocol error: unbalanced response");
      if (s[i] == ')') { ++i; break; }
      out.list.push_back(parse_sexp(s, i));
    }
    return out;
  }
  if (s[i] == '|') {
    std::size_t j = s.find('|', i + 1);
    if (j == std::string::npos) throw SmtError("protocol error: unterminated symbol");
    out.atom = s.substr(i + 1, j - i - 1);
    i = j + 1;
    return out;
  }
  if (s[i] == '"') {
    std::size_t j = i + 1;
    while (j < s.size()) {
      if (s[j] == '"' && (j + 1 >= s.size() || s[j + 1] != '"')) break;
      j += s[j] == '"' ? 2 : 1;
    }
    out.atom = s.substr(i, j + 1 - i);
    i = j + 1;
    return out;
  }
  std::size_t j = i;
  while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')') ++j;
  out.atom = s.substr(i, j - i);
  i = j;
  return out;
}

Sexp parse_sexp(const std::string& s) {
  std::size_t i = 0;
  return parse_sexp(s, i);
}

Value parse_value(const Sexp& e, Sort sort) {
  if (!e.is_list) {
    if (e.atom == "true") return Value::of_bool(true);
    if (e.atom == "false") return Value::of_bool(false);
    if (!e.atom.empty() && std::isdigit(static_cast<unsigned char>(e.atom[0])) &&
        e.atom.find('.') == std::string::npos) {
      if (sort != Sort::Int) throw SmtError("protocol error: integer value for Bool variable");
      return Value::of_int(Integer(e.atom));
    }
    throw SmtError("protocol error: unsupported model value " + e.atom);
  }
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
    Value v = parse_value(e.list[1], sort);
    return Value::of_int(-v.as_int());
  }
  throw SmtError("protocol error: unsupported model value (rationals are rejected)");
}

}  // namespace

std::string smt_symbol(const std::string& name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0])) && !reserved().count(name);
  for (char c : name) simple = simple && simple_symbol_char(c);
  return simple ? name : "|" + name + "|";
}

std::string lower(const Term& t) {
  std::ostringstream os;
  lower_term(os, t);
  return os.str();
}

std::string lower(const Formula& f) {
  std::ostringstream os;
  lower_formula(os, f);
  return os.str();
}

// ---------------------------------------------------------------------------
// Session

SmtSession::SmtSession(SmtConfig config) : config_(std::move(config)) { signal(SIGPIPE, SIG_IGN); }

SmtSession::~SmtSession() { stop(); }

void SmtSession::start() {
  int in[2], out[2];
  if (pipe2(in, O_CLOEXEC) != 0 || pipe2(out, O_CLOEXEC) != 0) throw SmtError(std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) throw SmtError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(in[0], STDIN_FILENO);
    dup2(out[1], STDOUT_FILENO);
    close(in[0]); close(in[1]); close(out[0]); close(out[1]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(config_.solver_path.c_str()));
    for (auto& a : config_.solver_args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
  send("(set-option :produce-models true)\n(set-option :produce-unsat-cores true)\n" +
       std::string(config_.minimize_cores ? "(set-option :smt.core.minimize true)\n" : "") + "(set-logic " +
       config_.logic + ")\n");
}

void SmtSession::stop() {
  if (pid_ < 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = to_child_ = from_child_ = -1;
  buffer_.clear();
}

void SmtSession::restart() { stop(); }

void SmtSession::send(const std::string& text) {
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t n = write(to_child_, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      stop();
      throw SmtError("solver crashed (write failed): " + config_.solver_path);
    }
    off += static_cast<std::size_t>(n);
  }
}

namespace {

// Length of the first complete s-expression or atom in buf, or 0.
std::size_t complete_prefix(const std::string& buf) {
  std::size_t i = 0;
  while (i < buf.size() && std::isspace(static_cast<unsigned char>(buf[i]))) ++i;
  if (i >= buf.size()) return 0;
  if (buf[i] != '(') {
    std::size_t j = i;
    while (j < buf.size() && !std::isspace(static_cast<unsigned char>(buf[j]))) ++j;
    return j < buf.size() ? j : 0;
  }
  int depth = 0;
  bool bar = false, quote = false;
  for (std::size_t j = i; j < buf.size(); ++j) {
    char c = buf[j];
    if (bar) { bar = c != '|'; continue; }
    if (quote) { quote = c != '"'; continue; }
    if (c == '|') bar = true;
    else if (c == '"') quote = true;
    else if (c == '(') ++depth;
    else if (c == ')' && --depth == 0) return j + 1;
  }
  return 0;
}

}  // namespace

std::string SmtSession::read_sexpr(std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    if (std::size_t n = complete_prefix(buffer_)) {
      std::string out = buffer_.substr(0, n);
      buffer_.erase(0, n);
      std::size_t s = out.find_first_not_of(" \t\r\n");
      return s == std::string::npos ? "" : out.substr(s);
    }
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return {};
    int wait = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    pollfd p{from_child_, POLLIN, 0};
    int r = poll(&p, 1, wait);
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) continue;
    char chunk[65536];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      stop();
      throw SmtError("solver crashed or could not be started: " + config_.solver_path);
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

SmtResult SmtSession::check(const std::vector<LabeledFormula>& assertions, bool need_model, bool need_core,
                            std::optional<int> timeout_ms) {
  if (pid_ < 0) start();
  ++queries_;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms.value_or(config_.timeout_ms));

  VarSet vars;
  for (const auto& [label, f] : assertions) collect_vars(f, vars);

  std::ostringstream cmd;
  cmd << "(push 1)\n";
  for (const auto& [name, sort] : vars)
    cmd << "(declare-const " << smt_symbol(name) << (sort == Sort::Int ? " Int)\n" : " Bool)\n");
  for (const auto& [label, f] : assertions) {
    cmd << "(assert ";
    bool named = need_core && !label.empty();
    if (named) cmd << "(! ";
    lower_formula(cmd, f);
    if (named) cmd << " :named " << smt_symbol(label) << ")";
    cmd << ")\n";
  }
  cmd << "(check-sat)\n";
  send(cmd.str());

  auto expect = [&]() {
    std::string r = read_sexpr(deadline);
    if (r.rfind("(error", 0) == 0) {
      stop();
      throw SmtError("protocol error: " + r);
    }
    return r;
  };

  SmtResult result;
  std::string answer = expect();
  if (answer.empty()) {
    stop();
    result.reason = "timeout";
    return result;
  }
  // model and core extraction get their own budget; minimized cores can be slow
  deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(kFollowUpMs);
  auto give_up = [&]() {
    stop();
    SmtResult t;
    t.reason = "timeout";
    return t;
  };
  if (answer == "sat") {
    result.status = SmtResult::Status::Sat;
    if (need_model && !vars.empty()) {
      std::ostringstream q;
      q << "(get-value (";
      for (const auto& [name, sort] : vars) q << smt_symbol(name) << " ";
      q << "))\n";
      send(q.str());
      std::string resp = expect();
      if (resp.empty()) return give_up();
      Sexp e = parse_sexp(resp);
      auto it = vars.begin();
      for (const auto& pair : e.list) {
        if (it == vars.end()) break;
        if (!pair.is_list || pair.list.size() != 2) throw SmtError("protocol error: malformed get-value");
        result.model[it->first] = parse_value(pair.list[1], it->second);
        ++it;
      }
      for (; it != vars.end(); ++it) {
        result.model[it->first] = it->second == Sort::Int ? Value::of_int(0) : Value::of_bool(false);
        result.defaulted.insert(it->first);
      }
      for (const auto& [label, f] : assertions)
        if (!eval(f, result.model)) throw SmtError("model does not satisfy assertion " + label);
    }
  } else if (answer == "unsat") {
    result.status = SmtResult::Status::Unsat;
    if (need_core) {
      send("(get-unsat-core)\n");
      std::string resp = expect();
      if (resp.empty()) return give_up();
      for (const auto& l : parse_sexp(resp).list) result.core.insert(l.atom);
    }
  } else if (answer == "unknown") {
    result.reason = "unknown";
  } else {
    stop();
    throw SmtError("protocol error: unexpected response " + answer);
  }
  send("(pop 1)\n");
  return result;
}

SmtResult SmtSession::check_script(const VarSet& decls, const std::vector<std::string>& assertions,
                                   std::optional<int> timeout_ms) {
  if (pid_ < 0) start();
  ++queries_;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms.value_or(config_.timeout_ms));
  std::ostringstream cmd;
  cmd << "(push 1)\n";
  for (const auto& [name, sort] : decls)
    cmd << "(declare-const " << smt_symbol(name) << (sort == Sort::Int ? " Int)\n" : " Bool)\n");
  bool quantified = false;
  for (const auto& a : assertions) {
    cmd << "(assert " << a << ")\n";
    quantified = quantified || a.find("(forall") != std::string::npos || a.find("(exists") != std::string::npos;
  }
  // incremental mode skips quantifier elimination unless asked for
  cmd << (quantified ? "(check-sat-using (then qe smt))\n" : "(check-sat)\n");
  send(cmd.str());
  SmtResult result;
  std::string answer = read_sexpr(deadline);
  if (answer.empty()) {
    stop();
    result.reason = "timeout";
    return result;
  }
  if (answer.rfind("(error", 0) == 0) {
    stop();
    throw SmtError("protocol error: " + answer);
  }
  if (answer == "sat") result.status = SmtResult::Status::Sat;
  else if (answer == "unsat") result.status = SmtResult::Status::Unsat;
  else result.reason = answer;
  send("(pop 1)\n");
  return result;
}

}  // namespace pfw
