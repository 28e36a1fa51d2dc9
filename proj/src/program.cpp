#include "dpqa/program.hpp"

#include <cmath>
#include <stdexcept>

namespace dpqa {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

const char* instructionName(const Instruction& ins) {
  static constexpr const char* names[] = {"init", "rydberg", "move", "activate",
                                          "deactivate"};
  return names[ins.index()];
}

namespace {

Json point(Point p) { return Json::array({p.x, p.y}); }

Point readPoint(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw IoError("a point must be a two-element array");
  }
  return Point{j[0].get<double>(), j[1].get<double>()};
}

Json lines(const std::vector<LinePos>& ls, const char* key) {
  Json arr = Json::array();
  for (const auto& l : ls) {
    Json o;
    o["id"] = l.id;
    o[key] = l.um;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<LinePos> readLines(const Json& arr, const char* key) {
  std::vector<LinePos> out;
  for (const auto& o : arr) {
    out.push_back(LinePos{o.at("id").get<int>(), o.at(key).get<double>()});
  }
  return out;
}

Json moves(const std::vector<LineMove>& ls) {
  Json arr = Json::array();
  for (const auto& l : ls) {
    Json o;
    o["id"] = l.id;
    o["begin"] = l.begin;
    o["end"] = l.end;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<LineMove> readMoves(const Json& arr) {
  std::vector<LineMove> out;
  for (const auto& o : arr) {
    out.push_back(LineMove{o.at("id").get<int>(), o.at("begin").get<double>(),
                           o.at("end").get<double>()});
  }
  return out;
}

struct ToJson {
  Json operator()(const InitInstr& in) const {
    Json o;
    o["op"] = "init";
    Json traps = Json::array();
    for (auto p : in.slmTraps) {
      traps.push_back(point(p));
    }
    o["slm_traps"] = std::move(traps);
    o["columns"] = lines(in.columns, "x");
    o["rows"] = lines(in.rows, "y");
    Json atoms = Json::array();
    for (const auto& a : in.atoms) {
      Json e;
      e["qubit"] = a.qubit;
      e["array"] = a.aod ? "aod" : "slm";
      e["site"] = Json::array({a.siteX, a.siteY});
      e["pos"] = point(a.pos);
      if (a.aod) {
        e["col"] = a.col;
        e["row"] = a.row;
      }
      atoms.push_back(std::move(e));
    }
    o["atoms"] = std::move(atoms);
    return o;
  }
  Json operator()(const RydbergInstr& in) const {
    Json o;
    o["op"] = "rydberg";
    o["stage"] = in.stage;
    o["gates"] = in.gates;
    return o;
  }
  Json operator()(const MoveInstr& in) const {
    Json o;
    o["op"] = "move";
    o["columns"] = moves(in.columns);
    o["rows"] = moves(in.rows);
    o["duration_us"] = in.durationUs;
    Json atoms = Json::array();
    for (const auto& a : in.atoms) {
      Json e;
      e["qubit"] = a.qubit;
      e["begin"] = point(a.begin);
      e["end"] = point(a.end);
      atoms.push_back(std::move(e));
    }
    o["atoms"] = std::move(atoms);
    return o;
  }
  Json operator()(const ActivateInstr& in) const {
    Json o;
    o["op"] = "activate";
    o["columns"] = lines(in.columns, "x");
    o["rows"] = lines(in.rows, "y");
    o["duration_us"] = in.durationUs;
    return o;
  }
  Json operator()(const DeactivateInstr& in) const {
    Json o;
    o["op"] = "deactivate";
    o["columns"] = in.columns;
    o["rows"] = in.rows;
    o["duration_us"] = in.durationUs;
    return o;
  }
};

Instruction readInstruction(const Json& o) {
  const auto op = o.at("op").get<std::string>();
  if (op == "init") {
    InitInstr in;
    for (const auto& p : o.at("slm_traps")) {
      in.slmTraps.push_back(readPoint(p));
    }
    in.columns = readLines(o.at("columns"), "x");
    in.rows = readLines(o.at("rows"), "y");
    for (const auto& e : o.at("atoms")) {
      InitAtom a;
      a.qubit = e.at("qubit").get<int>();
      const auto kind = e.at("array").get<std::string>();
      if (kind != "aod" && kind != "slm") {
        throw IoError("atom array must be 'slm' or 'aod'");
      }
      a.aod = kind == "aod";
      a.siteX = e.at("site").at(0).get<int>();
      a.siteY = e.at("site").at(1).get<int>();
      a.pos = readPoint(e.at("pos"));
      if (a.aod) {
        a.col = e.at("col").get<int>();
        a.row = e.at("row").get<int>();
      }
      in.atoms.push_back(a);
    }
    return in;
  }
  if (op == "rydberg") {
    return RydbergInstr{o.at("stage").get<int>(),
                        o.at("gates").get<std::vector<int>>()};
  }
  if (op == "move") {
    MoveInstr in;
    in.columns = readMoves(o.at("columns"));
    in.rows = readMoves(o.at("rows"));
    in.durationUs = o.at("duration_us").get<double>();
    for (const auto& e : o.at("atoms")) {
      in.atoms.push_back(AtomMove{e.at("qubit").get<int>(),
                                  readPoint(e.at("begin")),
                                  readPoint(e.at("end"))});
    }
    return in;
  }
  if (op == "activate") {
    return ActivateInstr{readLines(o.at("columns"), "x"),
                         readLines(o.at("rows"), "y"),
                         o.at("duration_us").get<double>()};
  }
  if (op == "deactivate") {
    return DeactivateInstr{o.at("columns").get<std::vector<int>>(),
                           o.at("rows").get<std::vector<int>>(),
                           o.at("duration_us").get<double>()};
  }
  throw IoError("unknown instruction '" + op + "'");
}

} // namespace

Json toJson(const Program& p) {
  Json doc;
  doc["n"] = p.numQubits;
  doc["stages"] = p.numStages;
  doc["arch"] = toJson(p.spec);
  Json ins = Json::array();
  for (const auto& i : p.instructions) {
    ins.push_back(std::visit(ToJson{}, i));
  }
  doc["instructions"] = std::move(ins);
  return doc;
}

Program loadProgram(const Json& doc) {
  Program p;
  try {
    p.numQubits = doc.at("n").get<int>();
    p.numStages = doc.at("stages").get<int>();
    p.spec = loadArchSpec(doc.at("arch"));
    for (const auto& o : doc.at("instructions")) {
      p.instructions.push_back(readInstruction(o));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed program: ") + e.what());
  } catch (const ArchError& e) {
    throw IoError(std::string("malformed program architecture: ") + e.what());
  }
  return p;
}

Program loadProgramFile(const std::string& path) {
  return loadProgram(readJsonFile(path));
}

LineSnapshot interpolate(const MoveInstr& mv, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::domain_error("interpolation fraction must lie in [0, 1]");
  }
  auto lerp = [tau](const LineMove& l) {
    // Exact endpoints at tau = 0 and tau = 1.
    const double v = tau == 1.0 ? l.end : l.begin + (l.end - l.begin) * tau;
    return LinePos{l.id, v};
  };
  LineSnapshot out;
  for (const auto& l : mv.columns) {
    out.columns.push_back(lerp(l));
  }
  for (const auto& l : mv.rows) {
    out.rows.push_back(lerp(l));
  }
  return out;
}

} // namespace dpqa
