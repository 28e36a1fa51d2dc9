#pragma once

#include "dpqa/codegen.hpp"
#include "dpqa/solver.hpp"
#include "dpqa/verifier.hpp"

#include <optional>
#include <string>

namespace dpqa {

enum class Mode { Optimal, Hybrid, Auto };

Mode parseMode(const std::string& s);
const char* modeName(Mode m);

struct CompileOptions {
  Mode mode = Mode::Auto;
  /// Auto picks the optimal solver up to this many gates.
  int autoGateThreshold = 40;
  /// Hybrid peels may move atoms between SLM and AOD traps; without transfers
  /// the first peel fixes every line for good and peeling stalls quickly.
  bool hybridTransfers = true;
  SolverOptions solver;
};

struct CompileResult {
  Mode mode = Mode::Optimal;  ///< the mode that actually ran
  Assignment assignment;
  Program program;
  VerifyReport verification;
  std::optional<OptimalResult> optimal;
  std::optional<HybridResult> hybrid;
  double wallSeconds = 0.0;
  Json stats;
};

/// Solve, lower and verify. Solver exceptions propagate unchanged.
CompileResult compile(const Circuit& c, const ArchSpec& spec,
                      const CompileOptions& opts = {});

} // namespace dpqa
