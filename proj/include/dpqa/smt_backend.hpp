#pragma once

#include "dpqa/encoder.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpqa {

/// The solver process failed or answered something unparseable. Never
/// conflated with an UNSAT answer.
class BackendError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class CheckStatus { Sat, Unsat, Unknown, Timeout };

const char* statusName(CheckStatus s);

struct BackendConfig {
  /// Solver binary. Empty: $DPQA_SOLVER, then the path found at build time.
  std::string executable;
  unsigned seed = 0;
  /// Keep the generated script here instead of a temporary file.
  std::string keepScriptPath;
};

struct BackendResult {
  CheckStatus status = CheckStatus::Unknown;
  /// One value per declared model variable when Sat (Booleans as 0/1).
  std::vector<std::int64_t> values;
  double seconds = 0.0;
};

std::string resolveSolverExecutable(const BackendConfig& cfg);

/// Run one satisfiability query in a fresh solver process speaking SMT-LIB2.
BackendResult runSolver(const Model& model, double timeoutSeconds,
                        const BackendConfig& cfg = {});

/// Parse a `(get-value ...)` response into per-variable values.
std::vector<std::int64_t> parseModelValues(const std::string& text,
                                           const smt::ExprArena& arena);

} // namespace dpqa
