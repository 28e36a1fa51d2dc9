#include "dpqa/encoder.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace dpqa;
using namespace dpqa::testing;

namespace {

std::size_t pairs(int n) { return static_cast<std::size_t>(n) * (n - 1) / 2; }

} // namespace

TEST(Encoder, CoreVariableCountSixQubit) {
  const Model m = buildModel(sixQubitCircuit(), defaultArchSpec(), 4);
  EXPECT_EQ(m.coreVariableCount(), 129u);
  EXPECT_EQ(m.auxiliaryVariableCount(), 0u);
  const Model tiny = buildModel(Circuit(2, {{0, 1}}, true), defaultArchSpec(), 1);
  EXPECT_EQ(tiny.coreVariableCount(), 11u);
}

TEST(Encoder, CoreVariableCountProperty) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int g = static_cast<int>(rng() % 8);
    const int S = 1 + static_cast<int>(rng() % 4);
    const Circuit c = randomCircuit(rng, n, g, trial % 2 == 0);
    const Model m = buildModel(c, defaultArchSpec(), S);
    EXPECT_EQ(m.coreVariableCount(), static_cast<std::size_t>(5 * n * S + g));
    EXPECT_EQ(m.arena().vars().size(), m.coreVariableCount());
  }
}

TEST(Encoder, RejectsBadArguments) {
  const Circuit c = sixQubitCircuit();
  EXPECT_THROW(buildModel(c, defaultArchSpec(), 0), EncodeError);
  ArchSpec bad = defaultArchSpec();
  bad.x = 0;
  EXPECT_THROW(buildModel(c, bad, 2), ArchError);
  EncodeOptions dup;
  dup.gateSubset = std::vector<int>{1, 1};
  EXPECT_THROW(buildModel(c, defaultArchSpec(), 2, dup), EncodeError);
  EncodeOptions pinned;
  pinned.pinnedStage0 = true;
  EXPECT_THROW(buildModel(c, defaultArchSpec(), 1, pinned), EncodeError);
}

TEST(Encoder, CircuitFamilyCounts) {
  const Circuit c = sixQubitCircuit();
  const int S = 4;
  const auto counts = buildModel(c, defaultArchSpec(), S).familyCounts();
  const std::size_t interacting = interactionMap(c).size();
  EXPECT_EQ(interacting, 9u);
  EXPECT_EQ(counts.at(Family::Connectivity), static_cast<std::size_t>(c.numGates() * S));
  EXPECT_EQ(counts.at(Family::Collision), collisionPairs(c).size());
  EXPECT_EQ(counts.at(Family::Dependency), c.dependencies().size());
  EXPECT_EQ(counts.at(Family::Exactness), interacting * S);
  EXPECT_EQ(counts.at(Family::ExactnessEmpty), (pairs(6) - interacting) * S);
  EXPECT_EQ(counts.at(Family::OneAtomOneTrap), 2 * pairs(6) * S);
  EXPECT_EQ(counts.count(Family::TransferSite), 0u);
  EXPECT_EQ(counts.count(Family::Reachability), 0u);
  EXPECT_GT(counts.at(Family::FixedArray), 0u);

  ArchSpec tr = defaultArchSpec();
  tr.transfersAllowed = true;
  EncodeOptions eo;
  eo.allowTransfer = true;
  const auto withTransfer = buildModel(c, tr, S, eo).familyCounts();
  EXPECT_EQ(withTransfer.count(Family::FixedArray), 0u);
  EXPECT_GT(withTransfer.at(Family::TransferSite), 0u);
}

TEST(Encoder, AtLeastGates) {
  const Circuit c = sixQubitCircuit();
  EncodeOptions eo;
  eo.partial = true;
  const Model m = buildModel(c, defaultArchSpec(), 2, eo);
  EXPECT_EQ(m.auxiliaryVariableCount(), 9u);
  EXPECT_THROW(encodeAtLeastGates(m, -1, 0, 2), EncodeError);
  EXPECT_THROW(encodeAtLeastGates(m, 10, 0, 2), EncodeError);
  EXPECT_THROW(encodeAtLeastGates(m, 1, 1, 3), EncodeError);
  const Model same = encodeAtLeastGates(m, 0, 0, 2);
  EXPECT_EQ(same.assertions().size(), m.assertions().size());
  const Model three = encodeAtLeastGates(m, 3, 1, 2);
  EXPECT_GT(three.familyCounts().at(Family::Cardinality), 0u);
  EXPECT_GT(three.auxiliaryVariableCount(), m.auxiliaryVariableCount());
  EXPECT_EQ(three.coreVariableCount(), m.coreVariableCount());
}

TEST(Encoder, PinRejectsOutOfBounds) {
  const Model m = buildModel(Circuit(2, {{0, 1}}, true), defaultArchSpec(), 2);
  std::vector<QubitState> st = {{0, 0, false, 0, 0}, {0, 0, true, 0, 0}};
  EXPECT_EQ(pinInitialState(m, st).familyCounts().at(Family::Pin), 10u);
  EXPECT_EQ(pinInitialPlacement(m, st).familyCounts().at(Family::Pin), 6u);
  st[1].x = 16;
  EXPECT_THROW(pinInitialState(m, st), EncodeError);
  EXPECT_THROW(pinInitialPlacement(m, st), EncodeError);
  st.pop_back();
  EXPECT_THROW(pinInitialState(m, st), EncodeError);
}

TEST(Encoder, SmtTextIsDeterministicAndDeclaresEverything) {
  const Circuit c = sixQubitCircuit();
  const Model a = buildModel(c, defaultArchSpec(), 3);
  const Model b = buildModel(c, defaultArchSpec(), 3);
  const std::string text = a.toSmtLib2();
  EXPECT_EQ(text, b.toSmtLib2());
  EXPECT_EQ(text.rfind("(set-logic QF_LIA)", 0), 0u);
  for (const auto& v : a.arena().vars()) {
    EXPECT_NE(text.find("(declare-fun " + v.name + " ()"), std::string::npos) << v.name;
  }
  std::size_t asserts = 0;
  for (auto p = text.find("(assert "); p != std::string::npos;
       p = text.find("(assert ", p + 1)) {
    ++asserts;
  }
  EXPECT_EQ(asserts, a.assertions().size());
}

TEST(Encoder, HandAssignmentSatisfiesModel) {
  // q0 in the SLM trap of site (0,0), q1 on AOD column 0 and row 0 above it.
  const Model m = buildModel(Circuit(2, {{0, 1}}, true), defaultArchSpec(), 1);
  const auto& vt = m.vars();
  std::vector<std::int64_t> values(m.arena().vars().size(), 0);
  values[vt.a[vt.at(1, 0)]] = 1;
  EXPECT_TRUE(m.violatedAssertions(values).empty());

  auto moved = values;
  moved[vt.x[vt.at(1, 0)]] = 1;
  const auto bad = m.violatedAssertions(moved);
  ASSERT_FALSE(bad.empty());
  bool connectivity = false;
  for (auto k : bad) {
    connectivity = connectivity || m.assertions()[k].family == Family::Connectivity;
  }
  EXPECT_TRUE(connectivity);

  auto bothSlm = values;
  bothSlm[vt.a[vt.at(1, 0)]] = 0;
  EXPECT_FALSE(m.violatedAssertions(bothSlm).empty());
  EXPECT_THROW(m.violatedAssertions(std::vector<std::int64_t>(3, 0)), EncodeError);
}
