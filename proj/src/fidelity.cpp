#include "dpqa/fidelity.hpp"

#include "dpqa/verifier.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dpqa {

double moveTime(double distanceUm, const PhysicalParams& phys) {
  if (!(distanceUm >= 0)) {
    throw std::domain_error("move distance must be non-negative");
  }
  return phys.moveTimeUs * std::sqrt(distanceUm / phys.moveDistanceUm);
}

namespace {

FidelityReport estimateWith(const Program& p, double localGates, LaserMode mode) {
  const auto& phys = p.spec.phys;
  const Trace tr = simulatePositions(p);
  FidelityReport r;
  r.mode = mode;
  r.numStages = static_cast<int>(tr.stagePositions.size());
  if (mode == LaserMode::Local) {
    r.effectiveGates = localGates;
  } else {
    // A plane-wide pulse exposes every trapped qubit at every stage.
    r.effectiveGates = static_cast<double>(p.numQubits) * r.numStages / 2.0;
  }
  r.gateFidelityTotal = std::pow(phys.twoQubitFidelity, r.effectiveGates);
  r.gateInfidelity = 1.0 - r.gateFidelityTotal;
  r.totalMoveUs = tr.totalMoveUs;
  r.totalTransferUs = tr.totalTransferUs;
  r.idleUs = tr.idleUs;

  const double tcohUs = phys.coherenceTimeS * 1e6;
  const double idleSum = std::accumulate(r.idleUs.begin(), r.idleUs.end(), 0.0);
  if (!r.idleUs.empty()) {
    r.idleFraction = idleSum / static_cast<double>(r.idleUs.size()) / tcohUs;
  }
  r.movementInfidelity = 1.0 - std::exp(-idleSum / tcohUs);
  if (r.movementInfidelity > 0) {
    r.ratio = r.gateInfidelity / r.movementInfidelity;
  }
  return r;
}

} // namespace

FidelityReport estimate(const Program& p, const Circuit& c, LaserMode mode) {
  return estimateWith(p, c.numGates(), mode);
}

FidelityReport estimate(const Program& p, LaserMode mode) {
  std::size_t ledger = 0;
  for (const auto& ins : p.instructions) {
    if (const auto* ry = std::get_if<RydbergInstr>(&ins)) {
      ledger += ry->gates.size();
    }
  }
  return estimateWith(p, static_cast<double>(ledger), mode);
}

Json toJson(const FidelityReport& r) {
  Json o;
  o["laser"] = r.mode == LaserMode::Local ? "local" : "global";
  o["decoherence_model"] = "exponential dephasing over idle time";
  o["effective_gates"] = r.effectiveGates;
  o["stages"] = r.numStages;
  o["gate_fidelity_total"] = r.gateFidelityTotal;
  o["gate_infidelity"] = r.gateInfidelity;
  o["total_move_us"] = r.totalMoveUs;
  o["total_transfer_us"] = r.totalTransferUs;
  o["idle_us"] = r.idleUs;
  o["idle_fraction"] = r.idleFraction;
  o["movement_infidelity"] = r.movementInfidelity;
  o["ratio"] = r.ratio ? Json(*r.ratio) : Json(nullptr);
  return o;
}

} // namespace dpqa
