#pragma once

#include "dpqa/architecture.hpp"
#include "dpqa/json.hpp"

#include <variant>
#include <vector>

namespace dpqa {

/// µm coordinates in the plane of the array.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

struct LinePos {
  int id = 0;
  double um = 0.0;
  bool operator==(const LinePos&) const = default;
};

struct InitAtom {
  int qubit = 0;
  bool aod = false;
  int siteX = 0;
  int siteY = 0;
  Point pos;
  int col = -1;  ///< AOD atoms only
  int row = -1;
  bool operator==(const InitAtom&) const = default;
};

/// Initial trap configuration and atom loading.
struct InitInstr {
  std::vector<Point> slmTraps;
  std::vector<LinePos> columns;  ///< x of every active AOD column
  std::vector<LinePos> rows;     ///< y of every active AOD row
  std::vector<InitAtom> atoms;
  bool operator==(const InitInstr&) const = default;
};

/// Global Rydberg pulse. `gates` is the ledger of gates intended to run.
struct RydbergInstr {
  int stage = 0;
  std::vector<int> gates;
  bool operator==(const RydbergInstr&) const = default;
};

struct LineMove {
  int id = 0;
  double begin = 0.0;
  double end = 0.0;
  bool operator==(const LineMove&) const = default;
};

/// Claimed trajectory of one atom during a move.
struct AtomMove {
  int qubit = 0;
  Point begin;
  Point end;
  bool operator==(const AtomMove&) const = default;
};

/// Linear motion of AOD lines. Lines not listed stay where they are.
struct MoveInstr {
  std::vector<LineMove> columns;
  std::vector<LineMove> rows;
  double durationUs = 0.0;
  std::vector<AtomMove> atoms;
  bool operator==(const MoveInstr&) const = default;
};

/// Switch on AOD lines at the given coordinates. Any SLM atom that sits on
/// a newly created trap is picked up.
struct ActivateInstr {
  std::vector<LinePos> columns;
  std::vector<LinePos> rows;
  double durationUs = 0.0;
  bool operator==(const ActivateInstr&) const = default;
};

/// Switch off AOD lines. Atoms they hold drop into the SLM traps below.
struct DeactivateInstr {
  std::vector<int> columns;
  std::vector<int> rows;
  double durationUs = 0.0;
  bool operator==(const DeactivateInstr&) const = default;
};

using Instruction = std::variant<InitInstr, RydbergInstr, MoveInstr,
                                 ActivateInstr, DeactivateInstr>;

struct Program {
  ArchSpec spec;
  int numQubits = 0;
  int numStages = 0;
  std::vector<Instruction> instructions;
};

const char* instructionName(const Instruction& ins);

Json toJson(const Program& p);
Program loadProgram(const Json& doc);
Program loadProgramFile(const std::string& path);

/// Line coordinates of `mv` at fraction tau in [0, 1].
struct LineSnapshot {
  std::vector<LinePos> columns;
  std::vector<LinePos> rows;
};
LineSnapshot interpolate(const MoveInstr& mv, double tau);

} // namespace dpqa
