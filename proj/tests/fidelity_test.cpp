#include "dpqa/fidelity.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dpqa;
using namespace dpqa::testing;

TEST(Fidelity, MoveTimeLaw) {
  const PhysicalParams ph;
  EXPECT_NEAR(moveTime(110, ph), 200, 1e-9);
  EXPECT_NEAR(moveTime(27.5, ph), 100, 1e-9);
  EXPECT_EQ(moveTime(0, ph), 0.0);
  EXPECT_THROW(moveTime(-1, ph), std::domain_error);
  for (double d : {1.0, 7.0, 54.0, 300.0}) {
    EXPECT_NEAR(moveTime(4 * d, ph), 2 * moveTime(d, ph), 1e-9);
  }
}

TEST(Fidelity, ParentProgram) {
  const Program p = parentProgram();
  const FidelityReport local = estimate(p, parentCircuit());
  EXPECT_DOUBLE_EQ(local.effectiveGates, 5.0);
  EXPECT_EQ(local.numStages, 3);
  EXPECT_NEAR(local.gateFidelityTotal, std::pow(0.995, 5), 1e-12);
  EXPECT_NEAR(local.gateInfidelity, 1 - std::pow(0.995, 5), 1e-12);
  const double move = 2 * moveTime(52, p.spec.phys);
  EXPECT_NEAR(local.totalMoveUs, move, 1e-9);
  ASSERT_TRUE(local.ratio.has_value());
  EXPECT_GT(*local.ratio, 1.0);
  EXPECT_GT(local.movementInfidelity, 0.0);
  EXPECT_NEAR(local.idleFraction * p.spec.phys.coherenceTimeS * 1e6,
              [&] {
                double sum = 0;
                for (double v : local.idleUs) sum += v;
                return sum / local.idleUs.size();
              }(),
              1e-6);

  const FidelityReport fromLedger = estimate(p);
  EXPECT_DOUBLE_EQ(fromLedger.effectiveGates, 5.0);

  // Global pulses charge half the illuminated qubits per stage.
  const FidelityReport global = estimate(p, parentCircuit(), LaserMode::Global);
  EXPECT_DOUBLE_EQ(global.effectiveGates, 9.0);
  EXPECT_LT(global.gateFidelityTotal, local.gateFidelityTotal);
}

TEST(Fidelity, NoMovementHasNoRatio) {
  Program p = parentProgram();
  p.instructions.resize(2);
  p.numStages = 1;
  const FidelityReport r = estimate(p);
  EXPECT_EQ(r.totalMoveUs, 0.0);
  EXPECT_FALSE(r.ratio.has_value());
  EXPECT_TRUE(toJson(r).contains("gate_infidelity"));
}
