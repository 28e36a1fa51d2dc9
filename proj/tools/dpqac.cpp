// dpqac: compile, verify and score circuits for reconfigurable atom arrays.

#include "dpqa/architecture.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/codegen.hpp"
#include "dpqa/fidelity.hpp"
#include "dpqa/pipeline.hpp"
#include "dpqa/verifier.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace dpqa;

namespace {

enum Exit {
  kOk = 0,
  kViolations = 1,
  kTimeout = 2,
  kBoundsExhausted = 3,
  kIoError = 4,
  kSolverError = 5,
};

std::mutex gOut;
std::mutex gTimingsLock;
std::vector<std::string> gTimings;

/// One CSV row per solver query: circuit,phase,step,stages,at_least,status,seconds.
void collectTimings(const std::string& circuit, const Json& stats) {
  std::vector<std::string> rows;
  auto add = [&](const char* phase, int step, const Json& attempts) {
    for (const auto& a : attempts) {
      std::ostringstream row;
      row << circuit << ',' << phase << ',' << step << ',' << a.at("stages").get<int>()
          << ',' << a.value("at_least", 0) << ',' << a.at("status").get<std::string>()
          << ',' << a.at("seconds").get<double>();
      rows.push_back(row.str());
    }
  };
  if (stats.contains("attempts")) {
    add("optimal", 0, stats["attempts"]);
  }
  if (stats.contains("peels")) {
    int k = 0;
    for (const auto& p : stats["peels"]) {
      add("peel", k++, p.at("attempts"));
    }
  }
  if (stats.contains("residual_attempts")) {
    add("residual", 0, stats["residual_attempts"]);
  }
  std::lock_guard lock(gTimingsLock);
  gTimings.insert(gTimings.end(), rows.begin(), rows.end());
}

bool writeTimings(const std::string& path) {
  std::ofstream f(path);
  f << "circuit,phase,step,stages,at_least,status,seconds\n";
  for (const auto& r : gTimings) {
    f << r << '\n';
  }
  return static_cast<bool>(f);
}

void report(const std::string& msg) {
  std::lock_guard lock(gOut);
  std::cerr << msg << '\n';
}

struct CompileArgs {
  std::vector<std::string> circuits;
  std::string arch;
  std::string output;
  std::string outDir;
  std::string stats;
  std::string mode = "auto";
  std::string solver;
  std::string dumpSmt;
  std::string timings;
  double timeout = 600.0;
  double peelTimeout = 120.0;
  double switchFrac = 0.05;
  int autoThreshold = 40;
  unsigned seed = 0;
  int jobs = 1;
  bool transfers = false;
  bool fixedArray = false;
};

ArchSpec archFrom(const std::string& path, bool transfers) {
  ArchSpec spec = path.empty() ? defaultArchSpec() : loadArchSpecFile(path);
  spec.transfersAllowed = spec.transfersAllowed || transfers;
  requireValid(spec);
  return spec;
}

int compileOne(const CompileArgs& a, const ArchSpec& spec, const std::string& in,
               const std::string& programPath, const std::string& statsPath) {
  try {
    const Circuit c = loadCircuitFile(in);
    CompileOptions opts;
    opts.mode = parseMode(a.mode);
    opts.autoGateThreshold = a.autoThreshold;
    opts.hybridTransfers = !a.fixedArray;
    opts.solver.checkTimeoutSeconds = a.timeout;
    opts.solver.peelTimeoutSeconds = a.peelTimeout;
    opts.solver.switchFraction = a.switchFrac;
    opts.solver.backend.executable = a.solver;
    opts.solver.backend.seed = a.seed;
    opts.solver.backend.keepScriptPath = a.dumpSmt;
    auto res = compile(c, spec, opts);
    res.stats["circuit"] = in;
    if (!a.timings.empty()) {
      collectTimings(in, res.stats);
    }
    if (!statsPath.empty()) {
      writeJsonFile(statsPath, res.stats);
    }
    if (!res.verification.passed()) {
      std::lock_guard lock(gOut);
      std::cerr << in << ": compiled program failed verification\n";
      for (const auto& v : res.verification.violations) {
        std::cerr << toJson(v).dump() << '\n';
      }
      for (const auto& s : res.verification.structuralErrors) {
        std::cerr << s << '\n';
      }
      return kViolations;
    }
    writeJsonFile(programPath, toJson(res.program));
    report(in + ": S=" + std::to_string(res.assignment.numStages) + " (" +
           modeName(res.mode) + ", " + std::to_string(res.wallSeconds) + " s)");
    return kOk;
  } catch (const SolveTimeout& e) {
    report(in + ": timeout: " + e.what());
    return kTimeout;
  } catch (const BoundsExhausted& e) {
    report(in + ": " + e.what());
    return kBoundsExhausted;
  } catch (const RoutingDeadlock& e) {
    report(in + ": " + e.what());
    return kBoundsExhausted;
  } catch (const IoError& e) {
    report(in + ": " + e.what());
    return kIoError;
  } catch (const CircuitError& e) {
    report(in + ": invalid circuit: " + e.what());
    return kIoError;
  } catch (const BackendError& e) {
    report(in + ": solver error: " + e.what());
    return kSolverError;
  }
}

int compileAll(const CompileArgs& a);

int runCompile(const CompileArgs& a) {
  int rc = compileAll(a);
  if (!a.timings.empty() && !writeTimings(a.timings)) {
    report("cannot write " + a.timings);
    rc = std::max(rc, static_cast<int>(kIoError));
  }
  return rc;
}

int compileAll(const CompileArgs& a) {
  ArchSpec spec;
  try {
    spec = archFrom(a.arch, a.transfers);
    parseMode(a.mode);
  } catch (const std::exception& e) {
    report(e.what());
    return kIoError;
  }
  if (a.circuits.size() == 1 && a.outDir.empty()) {
    const std::string out = a.output.empty() ? "program.json" : a.output;
    return compileOne(a, spec, a.circuits.front(), out, a.stats);
  }
  if (a.outDir.empty()) {
    report("several circuits need --out-dir");
    return kIoError;
  }
  std::error_code ec;
  fs::create_directories(a.outDir, ec);
  if (ec) {
    report("cannot create " + a.outDir + ": " + ec.message());
    return kIoError;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kOk};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < a.circuits.size();) {
      const auto& in = a.circuits[k];
      const auto stem = fs::path(in).stem().string();
      const auto base = fs::path(a.outDir) / stem;
      const int rc = compileOne(a, spec, in, base.string() + ".program.json",
                                base.string() + ".stats.json");
      int cur = worst.load();
      while (rc > cur && !worst.compare_exchange_weak(cur, rc)) {
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::max(1, a.jobs); ++j) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }
  return worst.load();
}

int runVerify(const std::string& programPath, const std::string& circuitPath,
              const std::string& archPath) {
  try {
    Program p = loadProgramFile(programPath);
    const Circuit c = loadCircuitFile(circuitPath);
    if (!archPath.empty()) {
      p.spec = loadArchSpecFile(archPath);
    }
    const auto rep = verify(p, c);
    for (const auto& v : rep.violations) {
      std::cout << toJson(v).dump() << '\n';
    }
    for (const auto& s : rep.structuralErrors) {
      Json o;
      o["structural"] = s;
      std::cout << o.dump() << '\n';
    }
    for (const auto& w : rep.warnings) {
      Json o;
      o["warning"] = w;
      std::cerr << o.dump() << '\n';
    }
    return rep.passed() ? kOk : kViolations;
  } catch (const IoError& e) {
    report(e.what());
  } catch (const CircuitError& e) {
    report(std::string("invalid circuit: ") + e.what());
  } catch (const ArchError& e) {
    report(e.what());
  }
  return kIoError;
}

int runFidelity(const std::string& programPath, const std::string& circuitPath,
                const std::string& laser) {
  try {
    const Program p = loadProgramFile(programPath);
    const LaserMode mode = laser == "global" ? LaserMode::Global : LaserMode::Local;
    const auto rep = circuitPath.empty()
                         ? estimate(p, mode)
                         : estimate(p, loadCircuitFile(circuitPath), mode);
    std::cout << toJson(rep).dump(2) << '\n';
    return kOk;
  } catch (const IoError& e) {
    report(e.what());
  } catch (const CircuitError& e) {
    report(std::string("invalid circuit: ") + e.what());
  }
  return kIoError;
}

int runBench(const std::vector<int>& sizes, int count, int degree,
             std::uint64_t seed, const std::string& outDir) {
  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) {
    report("cannot create " + outDir + ": " + ec.message());
    return kIoError;
  }
  try {
    for (int n : sizes) {
      for (int k = 0; k < count; ++k) {
        const std::uint64_t s = seed * 1000003ULL + static_cast<std::uint64_t>(n) * 1009ULL + k;
        const auto c = generateGraphCircuit(n, degree, s);
        const auto path = fs::path(outDir) / (std::to_string(n) + "_" + std::to_string(k) + ".json");
        writeJsonFile(path.string(), toJson(c));
      }
    }
  } catch (const CircuitError& e) {
    report(e.what());
    return kIoError;
  } catch (const IoError& e) {
    report(e.what());
    return kIoError;
  }
  return kOk;
}

int runAnimate(const std::string& programPath, int framesPerMove,
               const std::string& output, const std::string& svgDir) {
  try {
    const Program p = loadProgramFile(programPath);
    const auto frames = animationFrames(p, framesPerMove);
    const Json doc = toJson(frames);
    if (output.empty()) {
      std::cout << doc.dump(2) << '\n';
    } else {
      writeJsonFile(output, doc);
    }
    if (!svgDir.empty()) {
      fs::create_directories(svgDir);
      for (std::size_t k = 0; k < frames.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05zu.svg", k);
        std::ofstream f(fs::path(svgDir) / name);
        f << frameSvg(p, frames[k]);
        if (!f) {
          throw IoError(std::string("cannot write ") + name);
        }
      }
    }
    return kOk;
  } catch (const IoError& e) {
    report(e.what());
  } catch (const std::exception& e) {
    report(e.what());
  }
  return kIoError;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layout synthesis for reconfigurable neutral-atom arrays"};
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compileCmd = app.add_subcommand("compile", "Compile circuits to DPQA programs");
  compileCmd->add_option("circuits", ca.circuits, "Circuit JSON files")->required();
  compileCmd->add_option("--arch", ca.arch, "Architecture JSON (defaults built in)");
  compileCmd->add_option("-o,--output", ca.output, "Program JSON (single circuit)");
  compileCmd->add_option("--out-dir", ca.outDir, "Output directory (batch)");
  compileCmd->add_option("--stats", ca.stats, "Stats JSON (single circuit)");
  compileCmd->add_option("--mode", ca.mode, "optimal, hybrid or auto")
      ->check(CLI::IsMember({"optimal", "hybrid", "auto"}));
  compileCmd->add_option("--auto-threshold", ca.autoThreshold,
                         "Auto mode runs the optimal solver up to this many gates");
  compileCmd->add_option("--timeout", ca.timeout, "Seconds per optimal query");
  compileCmd->add_option("--peel-timeout", ca.peelTimeout, "Seconds per peeling query");
  compileCmd->add_option("--switch-frac", ca.switchFrac,
                         "Hybrid hands over to the optimal solver below this gate fraction");
  compileCmd->add_option("--seed", ca.seed, "Solver random seed");
  compileCmd->add_option("--solver", ca.solver, "Solver binary (else $DPQA_SOLVER)");
  compileCmd->add_option("--timings", ca.timings, "CSV of per-query solver timings");
  compileCmd->add_option("--dump-smt", ca.dumpSmt, "Keep the last SMT-LIB2 query here");
  compileCmd->add_option("--jobs", ca.jobs, "Parallel compile jobs");
  compileCmd->add_flag("--transfers", ca.transfers, "Allow atom transfers in every mode");
  compileCmd->add_flag("--fixed-array", ca.fixedArray,
                       "Hybrid mode without atom transfers (unless --transfers)");

  std::string vProgram, vCircuit, vArch;
  auto* verifyCmd = app.add_subcommand("verify", "Check a program against the hardware rules");
  verifyCmd->add_option("program", vProgram)->required();
  verifyCmd->add_option("circuit", vCircuit)->required();
  verifyCmd->add_option("arch", vArch, "Architecture overriding the program's own");

  std::string fProgram, fCircuit, laser = "local";
  auto* fidCmd = app.add_subcommand("fidelity", "Estimate gate and movement infidelity");
  fidCmd->add_option("program", fProgram)->required();
  fidCmd->add_option("--circuit", fCircuit, "Circuit JSON (local gate count)");
  fidCmd->add_option("--laser", laser, "global or local")
      ->check(CLI::IsMember({"global", "local"}));

  std::vector<int> sizes;
  int count = 10;
  int degree = 3;
  std::uint64_t bSeed = 0;
  std::string bOut = "bench";
  auto* benchCmd = app.add_subcommand("bench", "Generate random regular graph circuits");
  benchCmd->add_option("--sizes", sizes, "Node counts")->required()->delimiter(',');
  benchCmd->add_option("--count", count, "Circuits per size");
  benchCmd->add_option("--degree", degree, "Graph degree");
  benchCmd->add_option("--seed", bSeed, "Base seed");
  benchCmd->add_option("--out-dir", bOut, "Output directory");

  std::string aProgram, aOut, aSvg;
  int framesPerMove = 8;
  auto* animCmd = app.add_subcommand("animate", "Sample qubit positions for animation");
  animCmd->add_option("program", aProgram)->required();
  animCmd->add_option("--frames-per-move", framesPerMove)->check(CLI::PositiveNumber);
  animCmd->add_option("-o,--output", aOut, "Frame JSON (default stdout)");
  animCmd->add_option("--svg-dir", aSvg, "Also write one SVG per frame");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kIoError;
  }

  if (*compileCmd) {
    return runCompile(ca);
  }
  if (*verifyCmd) {
    return runVerify(vProgram, vCircuit, vArch);
  }
  if (*fidCmd) {
    return runFidelity(fProgram, fCircuit, laser);
  }
  if (*benchCmd) {
    return runBench(sizes, count, degree, bSeed, bOut);
  }
  if (*animCmd) {
    return runAnimate(aProgram, framesPerMove, aOut, aSvg);
  }
  return kIoError;
}
