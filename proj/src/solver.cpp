#include "dpqa/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace dpqa {

std::vector<QubitState> Assignment::stageStates(int stage) const {
  std::vector<QubitState> out;
  out.reserve(numQubits);
  for (int i = 0; i < numQubits; ++i) {
    out.push_back(at(i, stage));
  }
  return out;
}

std::vector<int> Assignment::gatesAt(int stage) const {
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(gateStage.size()); ++j) {
    if (gateStage[j] == stage) {
      out.push_back(j);
    }
  }
  return out;
}

Json toJson(const Assignment& a) {
  Json doc;
  doc["n"] = a.numQubits;
  doc["stages"] = a.numStages;
  doc["gate_stage"] = a.gateStage;
  Json qubits = Json::array();
  for (int i = 0; i < a.numQubits; ++i) {
    Json per = Json::array();
    for (int s = 0; s < a.numStages; ++s) {
      const auto& st = a.at(i, s);
      per.push_back(Json::array({st.x, st.y, st.aod ? 1 : 0, st.col, st.row}));
    }
    qubits.push_back(std::move(per));
  }
  doc["states"] = std::move(qubits);
  return doc;
}

Assignment loadAssignment(const Json& doc) {
  Assignment a;
  try {
    a.numQubits = doc.at("n").get<int>();
    a.numStages = doc.at("stages").get<int>();
    a.gateStage = doc.at("gate_stage").get<std::vector<int>>();
    const auto& qs = doc.at("states");
    if (static_cast<int>(qs.size()) != a.numQubits) {
      throw IoError("assignment lists the wrong number of qubits");
    }
    for (const auto& per : qs) {
      if (static_cast<int>(per.size()) != a.numStages) {
        throw IoError("assignment lists the wrong number of stages");
      }
      for (const auto& v : per) {
        a.states.push_back(QubitState{v.at(0).get<int>(), v.at(1).get<int>(),
                                      v.at(2).get<int>() != 0,
                                      v.at(3).get<int>(), v.at(4).get<int>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed assignment: ") + e.what());
  }
  return a;
}

Json toJson(const AttemptRecord& r) {
  Json doc;
  doc["stages"] = r.stages;
  if (r.atLeast > 0) {
    doc["at_least"] = r.atLeast;
  }
  doc["status"] = statusName(r.status);
  doc["seconds"] = r.seconds;
  return doc;
}

SolveOutcome check(const Model& model, double timeoutSeconds,
                   const BackendConfig& backend) {
  const auto res = runSolver(model, timeoutSeconds, backend);
  SolveOutcome out;
  out.status = res.status;
  out.seconds = res.seconds;
  if (res.status == CheckStatus::Sat) {
    const auto bad = model.violatedAssertions(res.values);
    if (!bad.empty()) {
      const auto& a = model.assertions()[bad.front()];
      throw BackendError(std::string("solver model violates a ") +
                         familyName(a.family) + " assertion: " +
                         model.arena().toString(a.expr));
    }
    out.values = res.values;
  }
  return out;
}

Assignment assignmentFromValues(const Model& model,
                                std::span<const std::int64_t> values,
                                int circuitGates) {
  const auto& vt = model.vars();
  Assignment a;
  a.numQubits = vt.numQubits;
  a.numStages = vt.numStages;
  a.states.resize(static_cast<std::size_t>(vt.numQubits) * vt.numStages);
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    a.states[k] = QubitState{static_cast<int>(values[vt.x[k]]),
                             static_cast<int>(values[vt.y[k]]),
                             values[vt.a[k]] != 0,
                             static_cast<int>(values[vt.c[k]]),
                             static_cast<int>(values[vt.r[k]])};
  }
  a.gateStage.assign(circuitGates, -1);
  for (std::size_t k = 0; k < vt.gateIds.size(); ++k) {
    if (!vt.executed.empty() && values[vt.executed[k]] == 0) {
      continue;
    }
    a.gateStage[vt.gateIds[k]] = static_cast<int>(values[vt.t[k]]);
  }
  return a;
}

namespace {

int ceilDiv(int a, int b) { return (a + b - 1) / b; }

/// The gates listed, as a circuit of their own, keeping only the
/// dependencies between them.
Circuit subCircuit(const Circuit& c, const std::vector<int>& gates) {
  std::vector<int> local(c.numGates(), -1);
  std::vector<std::pair<int, int>> ops;
  for (int id : gates) {
    local[id] = static_cast<int>(ops.size());
    ops.emplace_back(c.gate(id).qLo, c.gate(id).qHi);
  }
  std::vector<GatePair> deps;
  if (!c.commutable()) {
    for (const auto& [a, b] : c.dependencies()) {
      if (local[a] >= 0 && local[b] >= 0) {
        deps.emplace_back(local[a], local[b]);
      }
    }
  }
  return Circuit(c.numQubits(), std::move(ops), deps.empty(), std::move(deps));
}

} // namespace

int stageLowerBound(const Circuit& c) {
  const int G = c.numGates();
  if (G == 0) {
    return 1;
  }
  int lb = dependencyDepth(c);
  const int match = maxMatchingBound(c.gates());
  lb = std::max(lb, ceilDiv(G, std::max(1, match)));
  const int half = c.numQubits() / 2;
  if (half > 0) {
    lb = std::max(lb, ceilDiv(G, half));
  }
  return std::max(lb, 1);
}

OptimalResult solveOptimal(const Circuit& c, const ArchSpec& spec,
                           const SolverOptions& opts) {
  requireValid(spec);
  OptimalResult res;
  res.lowerBound = stageLowerBound(c);
  const int cap = std::max(c.numGates(), 1);
  EncodeOptions eo;
  eo.allowTransfer = spec.transfersAllowed;
  double elapsed = 0.0;
  for (int S = res.lowerBound;; ++S) {
    if (S > cap) {
      throw BoundsExhausted(
          "no schedule within " + std::to_string(cap) +
          " stages: the spatial bounds are too small for this circuit");
    }
    const Model m = buildModel(c, spec, S, eo);
    const auto out = check(m, opts.checkTimeoutSeconds, opts.backend);
    elapsed += out.seconds;
    res.attempts.push_back(AttemptRecord{S, 0, out.status, out.seconds});
    if (out.status == CheckStatus::Sat) {
      res.assignment = assignmentFromValues(m, out.values, c.numGates());
      res.coreVariables = m.coreVariableCount();
      return res;
    }
    if (out.status != CheckStatus::Unsat) {
      throw SolveTimeout("solver gave no answer at S=" + std::to_string(S),
                         elapsed);
    }
  }
}

OptimalResult solveOptimalFrom(const Circuit& c, const ArchSpec& spec,
                               std::span<const QubitState> start,
                               const std::vector<int>& gates,
                               const SolverOptions& opts) {
  requireValid(spec);
  OptimalResult res;
  if (gates.empty()) {
    res.lowerBound = 0;
    res.assignment.numQubits = c.numQubits();
    res.assignment.numStages = 1;
    res.assignment.states.assign(start.begin(), start.end());
    res.assignment.gateStage.assign(c.numGates(), -1);
    return res;
  }
  res.lowerBound = stageLowerBound(subCircuit(c, gates));
  // The replayed start state can force extra moves, so the scan may need a
  // little more room than one stage per gate.
  const int cap = static_cast<int>(gates.size()) + 2;
  EncodeOptions eo;
  eo.allowTransfer = spec.transfersAllowed;
  eo.pinnedStage0 = true;
  eo.gateSubset = gates;
  double elapsed = 0.0;
  for (int S = res.lowerBound;; ++S) {
    if (S > cap) {
      throw BoundsExhausted("residual circuit does not fit in " +
                            std::to_string(cap) + " stages");
    }
    const Model m = pinInitialPlacement(buildModel(c, spec, S + 1, eo), start);
    const auto out = check(m, opts.checkTimeoutSeconds, opts.backend);
    elapsed += out.seconds;
    res.attempts.push_back(AttemptRecord{S, 0, out.status, out.seconds});
    if (out.status == CheckStatus::Sat) {
      res.assignment = assignmentFromValues(m, out.values, c.numGates());
      res.coreVariables = m.coreVariableCount();
      return res;
    }
    if (out.status != CheckStatus::Unsat) {
      throw SolveTimeout("solver gave no answer for the residual at S=" +
                             std::to_string(S),
                         elapsed);
    }
  }
}

PeelResult peelStep(const Circuit& c, const ArchSpec& spec, const PeelState& st,
                    const SolverOptions& opts) {
  if (st.remaining.empty()) {
    throw EncodeError("peeling step with no remaining gates");
  }
  const std::set<int> left(st.remaining.begin(), st.remaining.end());
  // Only gates whose predecessors all ran can execute next.
  std::set<int> blocked;
  for (const auto& [from, to] : c.dependencies()) {
    if (left.count(from) && left.count(to)) {
      blocked.insert(to);
    }
  }
  std::vector<Gate> front;
  for (int id : st.remaining) {
    if (!blocked.count(id)) {
      front.push_back(c.gate(id));
    }
  }

  PeelResult res;
  res.matchingBound = maxMatchingBound(front);
  const bool first = st.current.empty();
  const int base = first ? 1 : 2;

  EncodeOptions eo;
  eo.allowTransfer = spec.transfersAllowed;
  eo.pinnedStage0 = !first;
  eo.partial = true;
  eo.gateSubset = st.remaining;
  eo.reachability = first && !spec.transfersAllowed;

  bool anyTimeout = false;
  double elapsed = 0.0;
  auto attempt = [&](int S, int M) -> bool {
    Model m = buildModel(c, spec, S, eo);
    if (!first) {
      m = pinInitialPlacement(std::move(m), st.current);
    }
    m = encodeAtLeastGates(std::move(m), M, first ? 0 : 1, S);
    const auto out = check(m, opts.peelTimeoutSeconds, opts.backend);
    elapsed += out.seconds;
    res.attempts.push_back(AttemptRecord{S, M, out.status, out.seconds});
    if (out.status != CheckStatus::Sat) {
      anyTimeout = anyTimeout || out.status != CheckStatus::Unsat;
      return false;
    }
    const auto a = assignmentFromValues(m, out.values, c.numGates());
    for (int s = first ? 0 : 1; s < S; ++s) {
      res.stages.push_back(a.stageStates(s));
      res.stageGates.push_back(a.gatesAt(s));
    }
    for (int id : st.remaining) {
      if (a.gateStage[id] >= 0) {
        res.executed.push_back(id);
      }
    }
    return true;
  };

  // Largest M first; a query without an answer counts as a failed M.
  for (int M = res.matchingBound; M >= 1; --M) {
    if (attempt(base, M)) {
      return res;
    }
  }
  for (int extra = 1; extra <= opts.maxPeelWidening; ++extra) {
    if (attempt(base + extra, 1)) {
      return res;
    }
  }
  if (anyTimeout) {
    throw SolveTimeout("peeling step found no answer within its time limit",
                       elapsed);
  }
  throw RoutingDeadlock("no remaining gate can be executed from the current "
                        "placement");
}

HybridResult solveHybrid(const Circuit& c, const ArchSpec& spec,
                         const SolverOptions& opts) {
  requireValid(spec);
  HybridResult res;
  const int G = c.numGates();
  const double threshold = opts.switchFraction * G;
  if (G == 0 || G <= threshold) {
    res.residual = solveOptimal(c, spec, opts);
    res.residualGates = G;
    res.assignment = res.residual->assignment;
    return res;
  }

  std::vector<std::vector<QubitState>> stages;
  std::vector<std::vector<int>> stageGates;
  PeelState st;
  for (int j = 0; j < G; ++j) {
    st.remaining.push_back(j);
  }
  while (static_cast<double>(st.remaining.size()) > threshold) {
    auto pr = peelStep(c, spec, st, opts);
    for (std::size_t k = 0; k < pr.stages.size(); ++k) {
      stages.push_back(pr.stages[k]);
      stageGates.push_back(pr.stageGates[k]);
    }
    const std::set<int> done(pr.executed.begin(), pr.executed.end());
    std::erase_if(st.remaining, [&](int id) { return done.count(id) > 0; });
    st.current = stages.back();
    res.peels.push_back(std::move(pr));
  }
  if (!st.remaining.empty()) {
    res.residualGates = static_cast<int>(st.remaining.size());
    res.residual = solveOptimalFrom(c, spec, st.current, st.remaining, opts);
    const auto& ra = res.residual->assignment;
    for (int s = 1; s < ra.numStages; ++s) {
      stages.push_back(ra.stageStates(s));
      stageGates.push_back(ra.gatesAt(s));
    }
  }

  auto& a = res.assignment;
  a.numQubits = c.numQubits();
  a.numStages = static_cast<int>(stages.size());
  a.states.resize(static_cast<std::size_t>(a.numQubits) * a.numStages);
  a.gateStage.assign(G, -1);
  for (int s = 0; s < a.numStages; ++s) {
    for (int i = 0; i < a.numQubits; ++i) {
      a.states[static_cast<std::size_t>(i) * a.numStages + s] = stages[s][i];
    }
    for (int id : stageGates[s]) {
      a.gateStage[id] = s;
    }
    res.emptyStages += stageGates[s].empty() ? 1 : 0;
  }
  return res;
}

} // namespace dpqa
