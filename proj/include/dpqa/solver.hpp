#pragma once

#include "dpqa/architecture.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/encoder.hpp"
#include "dpqa/json.hpp"
#include "dpqa/smt_backend.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace dpqa {

/// Concrete per-qubit per-stage states and a stage per gate.
struct Assignment {
  int numQubits = 0;
  int numStages = 0;
  std::vector<QubitState> states;  ///< index qubit * numStages + stage
  std::vector<int> gateStage;      ///< per circuit gate id

  [[nodiscard]] const QubitState& at(int qubit, int stage) const {
    return states.at(static_cast<std::size_t>(qubit) * numStages + stage);
  }
  [[nodiscard]] std::vector<QubitState> stageStates(int stage) const;
  /// Circuit gate ids executed at `stage`, ascending.
  [[nodiscard]] std::vector<int> gatesAt(int stage) const;
};

Json toJson(const Assignment& a);
Assignment loadAssignment(const Json& doc);

class SolveTimeout : public std::runtime_error {
public:
  SolveTimeout(const std::string& what, double elapsed)
      : std::runtime_error(what), elapsedSeconds(elapsed) {}
  double elapsedSeconds;
};

class BoundsExhausted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class RoutingDeadlock : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SolveOutcome {
  CheckStatus status = CheckStatus::Unknown;
  std::vector<std::int64_t> values;  ///< Sat only; re-checked by substitution
  double seconds = 0.0;
};

struct SolverOptions {
  BackendConfig backend;
  double checkTimeoutSeconds = 600.0;
  double peelTimeoutSeconds = 120.0;
  double switchFraction = 0.05;
  /// Extra stages tried by a peeling step that cannot execute even one gate
  /// in the next stage.
  int maxPeelWidening = 3;
};

/// One solver query with the substitution re-check on SAT.
SolveOutcome check(const Model& model, double timeoutSeconds,
                   const BackendConfig& backend = {});

/// Read the assignment of a solved model. Gates outside the model, or left
/// unexecuted in a partial model, get stage -1.
Assignment assignmentFromValues(const Model& model,
                                std::span<const std::int64_t> values,
                                int circuitGates);

struct AttemptRecord {
  int stages = 0;
  int atLeast = 0;  ///< cardinality bound, peeling only
  CheckStatus status = CheckStatus::Unknown;
  double seconds = 0.0;
};

Json toJson(const AttemptRecord& r);

/// max(dependency depth, ceil(G / matching), ceil(G / floor(N/2))), at least 1.
int stageLowerBound(const Circuit& c);

struct OptimalResult {
  Assignment assignment;
  int lowerBound = 0;
  std::vector<AttemptRecord> attempts;  ///< every S tried, in order
  std::size_t coreVariables = 0;
};

/// Smallest S whose model is satisfiable, scanning upward from the lower
/// bound. Throws BoundsExhausted once S would exceed G.
OptimalResult solveOptimal(const Circuit& c, const ArchSpec& spec,
                           const SolverOptions& opts = {});

/// Residual form: qubits start in `start` (a replayed stage 0 that runs no
/// gate) and only `gates` remain. The returned assignment includes that
/// stage 0.
OptimalResult solveOptimalFrom(const Circuit& c, const ArchSpec& spec,
                               std::span<const QubitState> start,
                               const std::vector<int>& gates,
                               const SolverOptions& opts = {});

struct PeelState {
  std::vector<int> remaining;
  /// Empty before the first step: that step also chooses the placement.
  std::vector<QubitState> current;
};

struct PeelResult {
  std::vector<int> executed;
  /// States of the stages this step added (one, or more after widening),
  /// and the gates run at each of them.
  std::vector<std::vector<QubitState>> stages;
  std::vector<std::vector<int>> stageGates;
  int matchingBound = 0;
  std::vector<AttemptRecord> attempts;
};

PeelResult peelStep(const Circuit& c, const ArchSpec& spec, const PeelState& st,
                    const SolverOptions& opts = {});

struct HybridResult {
  Assignment assignment;
  std::vector<PeelResult> peels;
  std::optional<OptimalResult> residual;
  int residualGates = 0;
  /// Rydberg stages that run no gate (only after widening).
  int emptyStages = 0;
};

HybridResult solveHybrid(const Circuit& c, const ArchSpec& spec,
                         const SolverOptions& opts = {});

} // namespace dpqa
