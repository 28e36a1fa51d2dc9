#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace dpqa;
using namespace dpqa::testing;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(DPQAC_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dpqac_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, VerifyExitCodes) {
  writeJsonFile(path("parent.json"), toJson(parentProgram()));
  writeJsonFile(path("circuit.json"), toJson(parentCircuit()));
  writeJsonFile(path("mutant.json"), toJson(mutants().front().program));
  EXPECT_EQ(run("verify " + path("parent.json") + " " + path("circuit.json")), 0);
  EXPECT_EQ(run("verify " + path("mutant.json") + " " + path("circuit.json")), 1);
  EXPECT_EQ(run("verify " + path("missing.json") + " " + path("circuit.json")), 4);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("compile"), 4);
  EXPECT_EQ(run("compile " + path("missing.json")), 4);
  EXPECT_EQ(run("frobnicate"), 4);
}

TEST_F(Cli, CompileSixQubit) {
  const std::string out = path("six_qubit.program.json");
  const std::string stats = path("six_qubit.stats.json");
  ASSERT_EQ(run("compile " + dataPath("six_qubit.json") + " --mode optimal -o " + out +
                " --stats " + stats),
            0);
  const Program p = loadProgramFile(out);
  EXPECT_EQ(p.numStages, 4);
  EXPECT_TRUE(verify(p, sixQubitCircuit()).passed());
  EXPECT_EQ(readJsonFile(stats).at("S").get<int>(), 4);
  EXPECT_EQ(run("verify " + out + " " + dataPath("six_qubit.json")), 0);
  EXPECT_EQ(run("fidelity " + out + " --circuit " + dataPath("six_qubit.json")), 0);
  EXPECT_EQ(run("animate " + out + " --frames-per-move 2 -o " + path("frames.json")), 0);
  EXPECT_TRUE(fs::exists(path("frames.json")));
}

TEST_F(Cli, CompileTimeout) {
  const std::string circuit = path("c.json");
  writeJsonFile(circuit, toJson(generateGraphCircuit(14, 3, 2)));
  EXPECT_EQ(run("compile " + circuit + " --mode optimal --timeout 1 -o " +
                path("p.json")),
            2);
}

TEST_F(Cli, BoundsExhausted) {
  Json arch = toJson(defaultArchSpec());
  arch["x"] = 1;
  arch["y"] = 1;
  writeJsonFile(path("arch.json"), arch);
  writeJsonFile(path("c.json"), toJson(Circuit(3, {{0, 1}, {1, 2}}, true)));
  EXPECT_EQ(run("compile " + path("c.json") + " --mode optimal --arch " +
                path("arch.json") + " -o " + path("p.json")),
            3);
}

TEST_F(Cli, SolverErrors) {
  EXPECT_EQ(run("compile " + dataPath("six_qubit.json") + " --solver /nonexistent/z3 -o " +
                path("p.json")),
            5);
}

TEST_F(Cli, BenchWritesCircuits) {
  ASSERT_EQ(run("bench --sizes 10,12 --count 2 --out-dir " + dir_.string()), 0);
  for (const char* name : {"10_0.json", "10_1.json", "12_0.json", "12_1.json"}) {
    const Circuit c = loadCircuitFile(path(name));
    EXPECT_EQ(c.numGates(), 3 * c.numQubits() / 2) << name;
  }
}

TEST_F(Cli, TimingsCsv) {
  const std::string csv = path("t.csv");
  ASSERT_EQ(run("compile " + dataPath("six_qubit.json") + " --mode optimal -o " +
                path("p.json") + " --timings " + csv),
            0);
  std::ifstream f(csv);
  std::string header, first, second;
  std::getline(f, header);
  std::getline(f, first);
  std::getline(f, second);
  EXPECT_EQ(header, "circuit,phase,step,stages,at_least,status,seconds");
  EXPECT_NE(first.find(",optimal,0,3,0,unsat,"), std::string::npos) << first;
  EXPECT_NE(second.find(",optimal,0,4,0,sat,"), std::string::npos) << second;
}
