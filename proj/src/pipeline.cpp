#include "dpqa/pipeline.hpp"

#include <chrono>
#include <stdexcept>

namespace dpqa {

Mode parseMode(const std::string& s) {
  if (s == "optimal") {
    return Mode::Optimal;
  }
  if (s == "hybrid") {
    return Mode::Hybrid;
  }
  if (s == "auto") {
    return Mode::Auto;
  }
  throw std::invalid_argument("unknown mode '" + s + "'");
}

const char* modeName(Mode m) {
  switch (m) {
  case Mode::Optimal: return "optimal";
  case Mode::Hybrid: return "hybrid";
  case Mode::Auto: return "auto";
  }
  return "?";
}

namespace {

Json attemptsJson(const std::vector<AttemptRecord>& rs) {
  Json arr = Json::array();
  for (const auto& r : rs) {
    arr.push_back(toJson(r));
  }
  return arr;
}

} // namespace

CompileResult compile(const Circuit& c, const ArchSpec& spec,
                      const CompileOptions& opts) {
  requireValid(spec);
  CompileResult res;
  res.mode = opts.mode;
  if (res.mode == Mode::Auto) {
    res.mode = c.numGates() <= opts.autoGateThreshold ? Mode::Optimal : Mode::Hybrid;
  }

  const auto start = std::chrono::steady_clock::now();
  if (res.mode == Mode::Optimal) {
    res.optimal = solveOptimal(c, spec, opts.solver);
    res.assignment = res.optimal->assignment;
  } else {
    ArchSpec hs = spec;
    hs.transfersAllowed = hs.transfersAllowed || opts.hybridTransfers;
    res.hybrid = solveHybrid(c, hs, opts.solver);
    res.assignment = res.hybrid->assignment;
  }
  res.program = lower(res.assignment, c, spec);
  res.verification = verify(res.program, c);
  res.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json& st = res.stats;
  st["mode"] = modeName(res.mode);
  st["qubits"] = c.numQubits();
  st["gates"] = c.numGates();
  st["S"] = res.assignment.numStages;
  st["transfers"] = spec.transfersAllowed ||
                    (res.mode == Mode::Hybrid && opts.hybridTransfers);
  st["wall_seconds"] = res.wallSeconds;
  st["site_pitch_um"] = spec.sitePitchUm;
  st["site_pitch_note"] =
      "engineering default: 2.5 r_b plus twice the largest intra-site offset";
  if (res.optimal) {
    st["lower_bound"] = res.optimal->lowerBound;
    st["core_variables"] = res.optimal->coreVariables;
    st["attempts"] = attemptsJson(res.optimal->attempts);
  }
  if (res.hybrid) {
    Json peels = Json::array();
    for (const auto& p : res.hybrid->peels) {
      Json o;
      o["executed"] = p.executed;
      o["matching_bound"] = p.matchingBound;
      o["stages_added"] = p.stages.size();
      o["attempts"] = attemptsJson(p.attempts);
      peels.push_back(std::move(o));
    }
    st["peels"] = std::move(peels);
    st["residual_gates"] = res.hybrid->residualGates;
    if (res.hybrid->residual) {
      st["residual_attempts"] = attemptsJson(res.hybrid->residual->attempts);
    }
    st["empty_stages"] = res.hybrid->emptyStages;
  }
  Json ver;
  ver["passed"] = res.verification.passed();
  Json vs = Json::array();
  for (const auto& v : res.verification.violations) {
    vs.push_back(toJson(v));
  }
  ver["violations"] = std::move(vs);
  ver["structural_errors"] = res.verification.structuralErrors;
  ver["warnings"] = res.verification.warnings;
  st["verifier"] = std::move(ver);
  return res;
}

} // namespace dpqa
