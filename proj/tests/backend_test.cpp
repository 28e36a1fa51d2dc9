#include "dpqa/smt_backend.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace dpqa;
using namespace dpqa::testing;

TEST(Backend, ParsesModelValues) {
  smt::ExprArena ar;
  ar.declare("x_0_0", smt::Sort::Int);
  ar.declare("a_0_0", smt::Sort::Bool);
  ar.declare("t_3", smt::Sort::Int);
  const auto v = parseModelValues("((x_0_0 4)\n (a_0_0 true)\n (t_3 (- 2)))", ar);
  EXPECT_EQ(v, (std::vector<std::int64_t>{4, 1, -2}));
  EXPECT_THROW(parseModelValues("((x_0_0 4) (a_0_0 true))", ar), BackendError);
  EXPECT_THROW(parseModelValues("((y 4))", ar), BackendError);
  EXPECT_THROW(parseModelValues("((x_0_0 4.5) (a_0_0 true) (t_3 1))", ar), BackendError);
  EXPECT_THROW(parseModelValues("error", ar), BackendError);
}

TEST(Backend, SatModelSatisfiesEveryAssertion) {
  const Model m = buildModel(sixQubitCircuit(), defaultArchSpec(), 4);
  const BackendResult r = runSolver(m, 300);
  ASSERT_EQ(r.status, CheckStatus::Sat);
  ASSERT_EQ(r.values.size(), m.arena().vars().size());
  EXPECT_TRUE(m.violatedAssertions(r.values).empty());
}

TEST(Backend, UnsatIsReported) {
  // Three qubits and a single site: two of them must share it without a gate.
  ArchSpec spec = defaultArchSpec();
  spec.x = spec.y = 1;
  const Model m = buildModel(Circuit(3, {{0, 1}}, true), spec, 1);
  EXPECT_EQ(runSolver(m, 60).status, CheckStatus::Unsat);
}

TEST(Backend, MissingExecutableIsAnError) {
  const Model m = buildModel(Circuit(2, {{0, 1}}, true), defaultArchSpec(), 1);
  BackendConfig cfg;
  cfg.executable = "/nonexistent/solver";
  EXPECT_THROW(runSolver(m, 10, cfg), BackendError);
  EXPECT_EQ(resolveSolverExecutable(cfg), "/nonexistent/solver");
}

namespace {

/// Extend a solution of S stages to S+1 by repeating the final stage.
std::vector<std::int64_t> repeatFinalStage(const Model& from,
                                           std::span<const std::int64_t> values,
                                           const Model& to) {
  std::map<std::string, std::int64_t> byName;
  for (std::size_t k = 0; k < values.size(); ++k) {
    byName[from.arena().vars()[k].name] = values[k];
  }
  const std::string last = "_" + std::to_string(from.numStages() - 1);
  const std::string extra = "_" + std::to_string(from.numStages());
  std::vector<std::int64_t> out;
  for (const auto& v : to.arena().vars()) {
    std::string name = v.name;
    if (name.size() > extra.size() &&
        name.compare(name.size() - extra.size(), extra.size(), extra) == 0 &&
        name[0] != 't') {
      name = name.substr(0, name.size() - extra.size()) + last;
    }
    out.push_back(byName.at(name));
  }
  return out;
}

} // namespace

TEST(Backend, SatisfiabilityIsMonotoneInStages) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const Circuit c = randomCircuit(rng, 4, 3, true);
    const ArchSpec spec = defaultArchSpec();
    const int S = c.numGates();
    const Model m = buildModel(c, spec, S);
    const BackendResult r = runSolver(m, 60);
    ASSERT_EQ(r.status, CheckStatus::Sat);
    const Model bigger = buildModel(c, spec, S + 1);
    EXPECT_EQ(runSolver(bigger, 60).status, CheckStatus::Sat);

    // Repeating the last stage keeps its gate pairs colocated while no gate
    // runs there, so the literal extension breaks interaction exactness.
    const auto ext = repeatFinalStage(m, r.values, bigger);
    const auto bad = bigger.violatedAssertions(ext);
    bool lastStageHadGate = false;
    for (int j = 0; j < c.numGates(); ++j) {
      lastStageHadGate = lastStageHadGate || r.values[m.vars().t[j]] == S - 1;
    }
    if (lastStageHadGate) {
      ASSERT_FALSE(bad.empty());
      for (auto k : bad) {
        EXPECT_EQ(bigger.assertions()[k].family, Family::Exactness)
            << familyName(bigger.assertions()[k].family) << ": "
            << bigger.arena().toString(bigger.assertions()[k].expr);
      }
    } else {
      EXPECT_TRUE(bad.empty());
    }
  }
}
