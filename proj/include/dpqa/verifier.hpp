#pragma once

#include "dpqa/architecture.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/json.hpp"
#include "dpqa/program.hpp"

#include <set>
#include <string>
#include <vector>

namespace dpqa {

enum class Rule {
  TrapOverfilled,
  SlmMoved,
  LineTornApart,
  LineCrossing,
  MinSeparation,
  BlockadeUnsatisfied,
  InteractionExactness,
  StrayInteraction,
  TransferIllegal,
  GateCoverage,
  DependencyOrder,
};

const char* ruleName(Rule r);

struct Violation {
  Rule rule = Rule::TrapOverfilled;
  int instruction = -1;  ///< index into the program, -1 for whole-program rules
  int stage = -1;
  std::vector<int> qubits;
  std::vector<int> lines;  ///< line ids, for line rules
  std::vector<int> gates;
  double distanceUm = -1.0;  ///< when a distance is at issue
  std::string detail;
};

Json toJson(const Violation& v);

struct VerifyOptions {
  /// Qubits outside the illumination of a local laser: stray-interaction
  /// checks skip pairs that involve them.
  std::set<int> shieldedQubits;
  /// Number of interior samples per move for the redundant crossing and
  /// separation checks (tau = k / samples).
  int samplesPerMove = 8;
};

struct VerifyReport {
  std::vector<Violation> violations;
  std::vector<std::string> structuralErrors;
  std::vector<std::string> warnings;

  [[nodiscard]] bool passed() const {
    return violations.empty() && structuralErrors.empty();
  }
  [[nodiscard]] std::set<Rule> rules() const;
};

/// Interpret the program against the hardware rules and the circuit.
VerifyReport verify(const Program& p, const Circuit& c,
                    const VerifyOptions& opts = {});

struct Trace {
  /// Positions of every qubit at each Rydberg instruction, in program order.
  std::vector<std::vector<Point>> stagePositions;
  std::vector<double> idleUs;  ///< per qubit
  double totalMoveUs = 0.0;
  double totalTransferUs = 0.0;
  std::vector<std::string> structuralErrors;
};

/// Deterministic replay of positions and idle time, without rule checks.
/// Throws IoError when the program references unknown qubits or lines.
Trace simulatePositions(const Program& p);

} // namespace dpqa
