#include "dpqa/codegen.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace dpqa;
using namespace dpqa::testing;

namespace {

Assignment twoQubitAssignment() {
  // Stage 0: q0 (SLM) and q1 (AOD) share site (0,0). Stage 1: q1 moves to (2,1).
  Assignment a;
  a.numQubits = 2;
  a.numStages = 2;
  a.states = {{0, 0, false, 0, 0}, {0, 0, false, 0, 0},
              {0, 0, true, 0, 0}, {2, 1, true, 0, 0}};
  a.gateStage = {0};
  return a;
}

} // namespace

TEST(Codegen, Geometry) {
  const ArchSpec spec = defaultArchSpec();
  EXPECT_EQ(siteCenter(3, 2, spec), (Point{81, 54}));
  EXPECT_DOUBLE_EQ(stackOffset(0, 1, 2), 0.5);
  EXPECT_DOUBLE_EQ(stackOffset(0, 3, 2), -1.5);
  EXPECT_DOUBLE_EQ(stackOffset(2, 3, 2), 2.5);
  for (int rank = 0; rank < spec.colStack; ++rank) {
    EXPECT_LE(std::abs(stackOffset(rank, spec.colStack, spec.phys.minSeparationUm)),
              maxIntraSiteOffsetUm(spec) + 1e-12);
  }
}

TEST(Codegen, LowersHandAssignment) {
  const Circuit c(2, {{0, 1}}, true);
  const Program p = lower(twoQubitAssignment(), c, defaultArchSpec());
  EXPECT_EQ(p.numStages, 2);
  ASSERT_FALSE(p.instructions.empty());
  const auto& in = std::get<InitInstr>(p.instructions.front());
  ASSERT_EQ(in.atoms.size(), 2u);
  EXPECT_FALSE(in.atoms[0].aod);
  EXPECT_EQ(in.atoms[0].pos, (Point{0, 0}));
  EXPECT_TRUE(in.atoms[1].aod);
  int moves = 0;
  int pulses = 0;
  for (const auto& ins : p.instructions) {
    if (const auto* mv = std::get_if<MoveInstr>(&ins)) {
      ++moves;
      EXPECT_DOUBLE_EQ(mv->durationUs,
                       moveTime(distance(mv->atoms.at(1).begin, mv->atoms.at(1).end),
                                p.spec.phys));
    }
    pulses += std::holds_alternative<RydbergInstr>(ins);
  }
  EXPECT_EQ(moves, 1);
  EXPECT_EQ(pulses, 2);
  EXPECT_TRUE(verify(p, c).passed());
  const Trace t = simulatePositions(p);
  ASSERT_EQ(t.stagePositions.size(), 2u);
  EXPECT_EQ(std::lround(t.stagePositions[1][1].x / p.spec.sitePitchUm), 2);
  EXPECT_EQ(std::lround(t.stagePositions[1][1].y / p.spec.sitePitchUm), 1);
}

TEST(Codegen, RejectsUnrealisableAssignment) {
  Assignment a = twoQubitAssignment();
  a.states[1].x = 1;  // SLM atom drifts between stages
  EXPECT_THROW(lower(a, Circuit(2, {{0, 1}}, true), defaultArchSpec()), CodegenError);
}

TEST(Codegen, AnimationFrames) {
  const Program p = parentProgram();
  const auto frames = animationFrames(p, 4);
  EXPECT_EQ(frames.size(), 1u + 2 * 5);
  EXPECT_EQ(frames.front().positions[1], (Point{0.5, 0.5}));
  EXPECT_EQ(frames[5].positions[1], (Point{52.5, 0.5}));
  EXPECT_DOUBLE_EQ(frames[3].tau, 0.5);
  EXPECT_THROW(animationFrames(p, 0), std::invalid_argument);
  EXPECT_NE(frameSvg(p, frames[2]).find("<svg"), std::string::npos);
  EXPECT_EQ(toJson(frames).size(), frames.size());
}
