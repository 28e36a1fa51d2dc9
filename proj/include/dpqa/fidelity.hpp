#pragma once

#include "dpqa/architecture.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/json.hpp"
#include "dpqa/program.hpp"

#include <optional>
#include <vector>

namespace dpqa {

/// t = T0 sqrt(D / D0), in µs for a displacement in µm.
double moveTime(double distanceUm, const PhysicalParams& phys);

enum class LaserMode { Global, Local };

struct FidelityReport {
  LaserMode mode = LaserMode::Local;
  /// Gates charged: G for local addressing, sum over stages of illuminated
  /// qubits / 2 for a global pulse.
  double effectiveGates = 0.0;
  int numStages = 0;
  double gateFidelityTotal = 1.0;
  double gateInfidelity = 0.0;
  double totalMoveUs = 0.0;
  double totalTransferUs = 0.0;
  std::vector<double> idleUs;  ///< per qubit
  double idleFraction = 0.0;   ///< mean idle / T_coh
  double movementInfidelity = 0.0;
  std::optional<double> ratio;  ///< gate / movement, when movement > 0
};

/// Exponential dephasing over idle time, and f2q per charged gate.
FidelityReport estimate(const Program& p, const Circuit& c,
                        LaserMode mode = LaserMode::Local);
/// Same, taking the local gate count from the program's Rydberg ledger.
FidelityReport estimate(const Program& p, LaserMode mode = LaserMode::Local);

Json toJson(const FidelityReport& r);

} // namespace dpqa
