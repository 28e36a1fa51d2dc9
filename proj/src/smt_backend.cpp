#include "dpqa/smt_backend.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#ifndef DPQA_DEFAULT_SOLVER
#define DPQA_DEFAULT_SOLVER "z3"
#endif

namespace dpqa {

const char* statusName(CheckStatus s) {
  switch (s) {
  case CheckStatus::Sat: return "sat";
  case CheckStatus::Unsat: return "unsat";
  case CheckStatus::Unknown: return "unknown";
  case CheckStatus::Timeout: return "timeout";
  }
  return "?";
}

std::string resolveSolverExecutable(const BackendConfig& cfg) {
  if (!cfg.executable.empty()) {
    return cfg.executable;
  }
  if (const char* env = std::getenv("DPQA_SOLVER"); env && *env) {
    return env;
  }
  return DPQA_DEFAULT_SOLVER;
}

namespace {

struct ProcessOutput {
  std::string out;
  int exitCode = -1;
  bool killed = false;
};

ProcessOutput runProcess(const std::vector<std::string>& argv,
                         double wallLimitSeconds) {
  int fds[2];
  if (pipe(fds) != 0) {
    throw BackendError("cannot create pipe to solver");
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw BackendError("cannot fork solver process");
  }
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    std::vector<char*> args;
    for (const auto& a : argv) {
      args.push_back(const_cast<char*>(a.c_str()));
    }
    args.push_back(nullptr);
    execvp(args[0], args.data());
    const char msg[] = "dpqa: exec failed\n";
    [[maybe_unused]] auto n = write(STDOUT_FILENO, msg, sizeof msg - 1);
    _exit(127);
  }
  close(fds[1]);

  ProcessOutput res;
  const auto start = std::chrono::steady_clock::now();
  char buf[1 << 14];
  for (;;) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const double left = wallLimitSeconds - elapsed;
    if (left <= 0) {
      kill(pid, SIGKILL);
      res.killed = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int ready = poll(&p, 1, static_cast<int>(std::min(left, 1.0) * 1000) + 1);
    if (ready < 0) {
      if (errno == EINTR) {
        continue;
      }
      kill(pid, SIGKILL);
      res.killed = true;
      break;
    }
    if (ready == 0) {
      continue;
    }
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) {
      continue;
    }
    if (n <= 0) {
      break;
    }
    res.out.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    res.exitCode = WEXITSTATUS(status);
  }
  return res;
}

class Lexer {
public:
  explicit Lexer(const std::string& s) : s_(s) {}

  /// "(", ")", or an atom; empty at end of input.
  std::string next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    if (pos_ >= s_.size()) {
      return {};
    }
    const char ch = s_[pos_];
    if (ch == '(' || ch == ')') {
      ++pos_;
      return std::string(1, ch);
    }
    if (ch == '|') {
      const auto end = s_.find('|', pos_ + 1);
      if (end == std::string::npos) {
        throw BackendError("unterminated quoted symbol in solver output");
      }
      std::string sym = s_.substr(pos_ + 1, end - pos_ - 1);
      pos_ = end + 1;
      return sym;
    }
    const auto start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')') {
      ++pos_;
    }
    return s_.substr(start, pos_ - start);
  }

private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

std::int64_t parseValue(Lexer& lx, const std::string& first) {
  if (first == "true") {
    return 1;
  }
  if (first == "false") {
    return 0;
  }
  if (first == "(") {
    const auto op = lx.next();
    if (op != "-") {
      throw BackendError("unsupported value term '(" + op + " ...)'");
    }
    const auto v = parseValue(lx, lx.next());
    if (lx.next() != ")") {
      throw BackendError("malformed negative value");
    }
    return -v;
  }
  try {
    std::size_t used = 0;
    const auto v = std::stoll(first, &used);
    if (used != first.size()) {
      throw BackendError("malformed integer '" + first + "'");
    }
    return v;
  } catch (const std::logic_error&) {
    throw BackendError("malformed value '" + first + "'");
  }
}

} // namespace

std::vector<std::int64_t> parseModelValues(const std::string& text,
                                           const smt::ExprArena& arena) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < arena.vars().size(); ++k) {
    index.emplace(arena.vars()[k].name, k);
  }
  std::vector<std::int64_t> values(arena.vars().size(), 0);
  std::vector<bool> seen(values.size(), false);

  Lexer lx(text);
  if (lx.next() != "(") {
    throw BackendError("solver model does not start with '('");
  }
  for (;;) {
    auto tok = lx.next();
    if (tok == ")") {
      break;
    }
    if (tok != "(") {
      throw BackendError("malformed solver model near '" + tok + "'");
    }
    const auto name = lx.next();
    const auto it = index.find(name);
    if (it == index.end()) {
      throw BackendError("solver returned unknown variable '" + name + "'");
    }
    values[it->second] = parseValue(lx, lx.next());
    seen[it->second] = true;
    if (lx.next() != ")") {
      throw BackendError("malformed binding for '" + name + "'");
    }
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) {
      throw BackendError("solver model lacks variable '" + arena.vars()[k].name + "'");
    }
  }
  return values;
}

BackendResult runSolver(const Model& model, double timeoutSeconds,
                        const BackendConfig& cfg) {
  const auto& vars = model.arena().vars();
  std::string script = "(set-option :produce-models true)\n";
  script += "(set-option :random-seed " + std::to_string(cfg.seed) + ")\n";
  script += model.toSmtLib2();
  script += "(check-sat)\n";
  if (!vars.empty()) {
    script += "(get-value (";
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (k) {
        script += ' ';
      }
      script += vars[k].name;
    }
    script += "))\n";
  }

  namespace fs = std::filesystem;
  std::string path = cfg.keepScriptPath;
  // "{}" in the kept path becomes a per-process query counter.
  if (const auto at = path.find("{}"); at != std::string::npos) {
    static std::atomic<int> counter{0};
    path.replace(at, 2, std::to_string(counter++));
  }
  bool temporary = false;
  if (path.empty()) {
    auto tmpl = (fs::temp_directory_path() / "dpqa-XXXXXX.smt2").string();
    const int fd = mkstemps(tmpl.data(), 5);
    if (fd < 0) {
      throw BackendError("cannot create temporary SMT-LIB2 file");
    }
    close(fd);
    path = tmpl;
    temporary = true;
  }
  {
    std::ofstream f(path, std::ios::binary);
    f << script;
    if (!f) {
      throw BackendError("cannot write SMT-LIB2 script to " + path);
    }
  }

  const long limit = std::max(1L, static_cast<long>(std::ceil(timeoutSeconds)));
  const std::vector<std::string> argv = {resolveSolverExecutable(cfg), "-smt2",
                                         "-T:" + std::to_string(limit), path};
  const auto start = std::chrono::steady_clock::now();
  ProcessOutput po;
  try {
    po = runProcess(argv, static_cast<double>(limit) + 10.0);
  } catch (...) {
    if (temporary) {
      std::remove(path.c_str());
    }
    throw;
  }
  if (temporary) {
    std::remove(path.c_str());
  }

  BackendResult res;
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (po.killed) {
    res.status = CheckStatus::Timeout;
    return res;
  }
  const auto nl = po.out.find('\n');
  std::string head = po.out.substr(0, nl);
  while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back()))) {
    head.pop_back();
  }
  if (head == "sat") {
    res.status = CheckStatus::Sat;
    res.values = parseModelValues(
        nl == std::string::npos ? std::string("()") : po.out.substr(nl + 1),
        model.arena());
  } else if (head == "unsat") {
    res.status = CheckStatus::Unsat;
  } else if (head == "timeout") {
    res.status = CheckStatus::Timeout;
  } else if (head == "unknown") {
    res.status = res.seconds >= static_cast<double>(limit) - 0.5
                     ? CheckStatus::Timeout
                     : CheckStatus::Unknown;
  } else {
    throw BackendError("solver '" + argv[0] + "' failed (exit " +
                       std::to_string(po.exitCode) + "): " +
                       po.out.substr(0, 400));
  }
  return res;
}

} // namespace dpqa
