#include "dpqa/solver.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace dpqa;
using namespace dpqa::testing;

namespace {

/// Every gate runs at a stage whose layout puts its operands on one site.
void expectConsistent(const Assignment& a, const Circuit& c) {
  for (const auto& g : c.gates()) {
    const int s = a.gateStage.at(g.id);
    ASSERT_GE(s, 0) << "gate " << g.id;
    const auto& p = a.at(g.qLo, s);
    const auto& q = a.at(g.qHi, s);
    EXPECT_EQ(p.x, q.x);
    EXPECT_EQ(p.y, q.y);
  }
  for (const auto& [from, to] : c.dependencies()) {
    EXPECT_LT(a.gateStage[from], a.gateStage[to]);
  }
}

} // namespace

TEST(Solver, LowerBound) {
  EXPECT_EQ(stageLowerBound(sixQubitCircuit()), 3);
  EXPECT_EQ(stageLowerBound(Circuit(3, {}, true)), 1);
  // Triangle: matching 1, three gates.
  EXPECT_EQ(stageLowerBound(Circuit(3, {{0, 1}, {1, 2}, {0, 2}}, true)), 3);
  // Four disjoint-able gates on 4 qubits: floor(N/2) = 2.
  EXPECT_EQ(stageLowerBound(Circuit(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}}, true)), 2);
}

TEST(Solver, SixQubitOptimal) {
  const Circuit c = sixQubitCircuit();
  const OptimalResult r = solveOptimal(c, defaultArchSpec());
  EXPECT_EQ(r.assignment.numStages, 4);
  EXPECT_EQ(r.lowerBound, 3);
  ASSERT_EQ(r.attempts.size(), 2u);
  EXPECT_EQ(r.attempts[0].status, CheckStatus::Unsat);
  EXPECT_EQ(r.attempts[1].status, CheckStatus::Sat);
  EXPECT_EQ(r.coreVariables, 129u);
  expectConsistent(r.assignment, c);
  // A minimal schedule has no empty Rydberg stage.
  for (int s = 0; s < r.assignment.numStages; ++s) {
    EXPECT_FALSE(r.assignment.gatesAt(s).empty()) << "stage " << s;
  }
}

TEST(Solver, AssignmentJsonRoundTrip) {
  const Circuit c(2, {{0, 1}}, true);
  const OptimalResult r = solveOptimal(c, defaultArchSpec());
  const Assignment back = loadAssignment(toJson(r.assignment));
  EXPECT_EQ(back.states, r.assignment.states);
  EXPECT_EQ(back.gateStage, r.assignment.gateStage);
  EXPECT_EQ(back.gatesAt(0), (std::vector<int>{0}));
}

TEST(Solver, BoundsExhausted) {
  ArchSpec spec = defaultArchSpec();
  spec.x = spec.y = 1;
  EXPECT_THROW(solveOptimal(Circuit(3, {{0, 1}, {1, 2}}, true), spec), BoundsExhausted);
}

TEST(Solver, PeelStepMakesProgress) {
  ArchSpec spec = defaultArchSpec();
  spec.transfersAllowed = true;
  const Circuit c = generateGraphCircuit(10, 3, 4);
  PeelState st;
  for (int g = 0; g < c.numGates(); ++g) {
    st.remaining.push_back(g);
  }
  const PeelResult first = peelStep(c, spec, st);
  EXPECT_FALSE(first.executed.empty());
  EXPECT_LE(static_cast<int>(first.executed.size()), first.matchingBound);
  ASSERT_EQ(first.stages.size(), first.stageGates.size());
  ASSERT_FALSE(first.stages.empty());
  for (const auto& stage : first.stageGates) {
    std::set<int> used;
    for (int id : stage) {
      EXPECT_TRUE(used.insert(c.gate(id).qLo).second);
      EXPECT_TRUE(used.insert(c.gate(id).qHi).second);
    }
  }
}

TEST(Solver, HybridCoversEveryGate) {
  ArchSpec spec = defaultArchSpec();
  spec.transfersAllowed = true;
  const Circuit c = generateGraphCircuit(10, 3, 9);
  const HybridResult h = solveHybrid(c, spec);
  expectConsistent(h.assignment, c);
  int executed = h.residualGates;
  for (const auto& p : h.peels) {
    EXPECT_GE(p.executed.size(), 1u);
    executed += static_cast<int>(p.executed.size());
  }
  EXPECT_EQ(executed, c.numGates());
}
