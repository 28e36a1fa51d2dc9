#include "dpqa/verifier.hpp"

#include "dpqa/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace dpqa {

const char* ruleName(Rule r) {
  switch (r) {
  case Rule::TrapOverfilled: return "TrapOverfilled";
  case Rule::SlmMoved: return "SlmMoved";
  case Rule::LineTornApart: return "LineTornApart";
  case Rule::LineCrossing: return "LineCrossing";
  case Rule::MinSeparation: return "MinSeparation";
  case Rule::BlockadeUnsatisfied: return "BlockadeUnsatisfied";
  case Rule::InteractionExactness: return "InteractionExactness";
  case Rule::StrayInteraction: return "StrayInteraction";
  case Rule::TransferIllegal: return "TransferIllegal";
  case Rule::GateCoverage: return "GateCoverage";
  case Rule::DependencyOrder: return "DependencyOrder";
  }
  return "?";
}

Json toJson(const Violation& v) {
  Json o;
  o["rule"] = ruleName(v.rule);
  o["instruction"] = v.instruction;
  if (v.stage >= 0) {
    o["stage"] = v.stage;
  }
  if (!v.qubits.empty()) {
    o["qubits"] = v.qubits;
  }
  if (!v.lines.empty()) {
    o["lines"] = v.lines;
  }
  if (!v.gates.empty()) {
    o["gates"] = v.gates;
  }
  if (v.distanceUm >= 0) {
    o["distance_um"] = v.distanceUm;
  }
  o["detail"] = v.detail;
  return o;
}

std::set<Rule> VerifyReport::rules() const {
  std::set<Rule> out;
  for (const auto& v : violations) {
    out.insert(v.rule);
  }
  return out;
}

namespace {

constexpr double kTol = 1e-6;

bool near(double a, double b) { return std::abs(a - b) <= kTol; }
bool near(Point a, Point b) { return near(a.x, b.x) && near(a.y, b.y); }

struct AtomState {
  Point pos;
  bool loaded = false;
  bool aod = false;
  int col = -1;
  int row = -1;
  int trap = -1;  ///< SLM trap index, -1 when stranded or in the AOD
};

/// Replays a program instruction by instruction. With a circuit it also
/// checks every rule; without one it only tracks positions and time.
class Interpreter {
public:
  Interpreter(const Program& p, const Circuit* c, const VerifyOptions& opts)
      : p_(p), c_(c), opts_(opts), atoms_(p.numQubits),
        idle_(p.numQubits, 0.0) {
    if (c_) {
      execCount_.assign(c_->numGates(), 0);
      execStage_.assign(c_->numGates(), -1);
    }
  }

  void run() {
    if (p_.numQubits < 0) {
      structural("negative qubit count");
      return;
    }
    if (c_ && c_->numQubits() != p_.numQubits) {
      structural("program and circuit disagree on the qubit count");
      return;
    }
    if (p_.instructions.empty() ||
        !std::holds_alternative<InitInstr>(p_.instructions.front())) {
      structural("program must begin with init");
      return;
    }
    for (std::size_t k = 0; k < p_.instructions.size(); ++k) {
      idx_ = static_cast<int>(k);
      const auto& ins = p_.instructions[k];
      if (k > 0 && std::holds_alternative<InitInstr>(ins)) {
        structural("init may only appear once, first");
        continue;
      }
      std::visit([this](const auto& in) { step(in); }, ins);
    }
    if (stage_ != p_.numStages) {
      structural("program declares " + std::to_string(p_.numStages) +
                 " stages but contains " + std::to_string(stage_) +
                 " rydberg instructions");
    }
    if (c_) {
      finalChecks();
    }
  }

  VerifyReport report;
  Trace trace;

private:
  void structural(const std::string& msg) {
    std::ostringstream os;
    os << "instruction " << idx_ << ": " << msg;
    report.structuralErrors.push_back(os.str());
    trace.structuralErrors.push_back(os.str());
  }

  void warn(const std::string& msg) {
    std::ostringstream os;
    os << "instruction " << idx_ << ": " << msg;
    report.warnings.push_back(os.str());
  }

  void violate(Violation v) {
    if (!c_) {
      return;
    }
    v.instruction = idx_;
    report.violations.push_back(std::move(v));
  }

  bool validQubit(int q) const { return q >= 0 && q < p_.numQubits; }

  int findTrap(Point at) const {
    for (std::size_t t = 0; t < traps_.size(); ++t) {
      if (near(traps_[t], at)) {
        return static_cast<int>(t);
      }
    }
    return -1;
  }

  Point intersection(const AtomState& a) const {
    return Point{cols_.at(a.col), rows_.at(a.row)};
  }

  void checkSeparation(const std::map<int, double>& lines, bool columns) {
    std::vector<std::pair<double, int>> sorted;
    for (const auto& [id, um] : lines) {
      sorted.emplace_back(um, id);
    }
    std::sort(sorted.begin(), sorted.end());
    const double ds = p_.spec.phys.minSeparationUm;
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      const double gap = sorted[k].first - sorted[k - 1].first;
      if (gap < ds - kTol) {
        Violation v;
        v.rule = Rule::MinSeparation;
        v.lines = {sorted[k - 1].second, sorted[k].second};
        v.distanceUm = gap;
        v.detail = std::string("AOD ") + (columns ? "columns" : "rows") +
                   " closer than the minimum separation";
        violate(std::move(v));
      }
    }
  }

  void step(const InitInstr& in) {
    traps_ = in.slmTraps;
    trapOwner_.assign(traps_.size(), -1);
    auto addLines = [&](const std::vector<LinePos>& ls, std::map<int, double>& dst,
                        int bound, const char* what) {
      for (const auto& l : ls) {
        if (l.id < 0 || l.id >= bound) {
          structural(std::string(what) + " id " + std::to_string(l.id) +
                     " outside the architecture");
          continue;
        }
        if (!dst.emplace(l.id, l.um).second) {
          structural(std::string(what) + " " + std::to_string(l.id) +
                     " listed twice");
        }
      }
    };
    addLines(in.columns, cols_, p_.spec.c, "column");
    addLines(in.rows, rows_, p_.spec.r, "row");
    checkSeparation(cols_, true);
    checkSeparation(rows_, false);

    std::map<std::pair<int, int>, int> aodOwner;
    for (const auto& a : in.atoms) {
      if (!validQubit(a.qubit)) {
        structural("init loads unknown qubit " + std::to_string(a.qubit));
        continue;
      }
      auto& st = atoms_[a.qubit];
      if (st.loaded) {
        structural("init loads qubit " + std::to_string(a.qubit) + " twice");
        continue;
      }
      st.loaded = true;
      st.pos = a.pos;
      if (a.aod) {
        if (!cols_.count(a.col) || !rows_.count(a.row)) {
          structural("qubit " + std::to_string(a.qubit) +
                     " is bound to an inactive AOD line");
          st.loaded = false;
          continue;
        }
        st.aod = true;
        st.col = a.col;
        st.row = a.row;
        const Point at = intersection(st);
        if (!near(at, a.pos)) {
          Violation v;
          v.rule = Rule::LineTornApart;
          v.qubits = {a.qubit};
          v.lines = {a.col, a.row};
          v.distanceUm = distance(at, a.pos);
          v.detail = "initial position is not on its AOD trap";
          violate(std::move(v));
        }
        st.pos = at;
        const auto [it, fresh] = aodOwner.emplace(std::make_pair(a.col, a.row), a.qubit);
        if (!fresh) {
          Violation v;
          v.rule = Rule::TrapOverfilled;
          v.qubits = {it->second, a.qubit};
          v.lines = {a.col, a.row};
          v.detail = "two atoms in one AOD trap";
          violate(std::move(v));
        }
      } else {
        const int t = findTrap(a.pos);
        if (t < 0) {
          structural("qubit " + std::to_string(a.qubit) +
                     " is not loaded into any SLM trap");
          continue;
        }
        if (trapOwner_[t] >= 0) {
          Violation v;
          v.rule = Rule::TrapOverfilled;
          v.qubits = {trapOwner_[t], a.qubit};
          v.detail = "two atoms in one SLM trap";
          violate(std::move(v));
        } else {
          trapOwner_[t] = a.qubit;
        }
        st.trap = t;
      }
    }
    for (int q = 0; q < p_.numQubits; ++q) {
      if (!atoms_[q].loaded) {
        structural("qubit " + std::to_string(q) + " is never loaded");
        atoms_[q].loaded = true;  // report once
      }
    }
  }

  void step(const RydbergInstr& in) {
    if (in.stage != stage_) {
      structural("rydberg stage " + std::to_string(in.stage) + " out of order");
    }
    const int stage = stage_++;
    std::vector<Point> snap;
    for (const auto& a : atoms_) {
      snap.push_back(a.pos);
    }
    trace.stagePositions.push_back(snap);
    if (!c_) {
      return;
    }

    std::set<std::pair<int, int>> scheduled;
    for (int g : in.gates) {
      if (g < 0 || g >= c_->numGates()) {
        structural("rydberg lists unknown gate " + std::to_string(g));
        continue;
      }
      ++execCount_[g];
      execStage_[g] = stage;
      const auto& gate = c_->gate(g);
      scheduled.emplace(gate.qLo, gate.qHi);
      const double d = distance(snap[gate.qLo], snap[gate.qHi]);
      if (d > p_.spec.phys.rydbergRadiusUm + kTol) {
        Violation v;
        v.rule = Rule::BlockadeUnsatisfied;
        v.stage = stage;
        v.qubits = {gate.qLo, gate.qHi};
        v.gates = {g};
        v.distanceUm = d;
        v.detail = "gate operands are outside the blockade radius";
        violate(std::move(v));
      }
    }

    const double rb = p_.spec.phys.rydbergRadiusUm;
    for (int i = 0; i < p_.numQubits; ++i) {
      for (int j = i + 1; j < p_.numQubits; ++j) {
        if (scheduled.count({i, j})) {
          continue;
        }
        const double d = distance(snap[i], snap[j]);
        Violation v;
        v.rule = Rule::TrapOverfilled;
        v.stage = stage;
        v.qubits = {i, j};
        v.distanceUm = d;
        if (d <= kTol) {
          v.detail = "two atoms at one position";
        } else if (d <= rb + kTol) {
          v.rule = Rule::InteractionExactness;
          v.detail = "pair within the blockade radius without a scheduled gate";
        } else if (d < 2.5 * rb - kTol) {
          if (opts_.shieldedQubits.count(i) || opts_.shieldedQubits.count(j)) {
            continue;
          }
          v.rule = Rule::StrayInteraction;
          v.detail = "pair closer than 2.5 blockade radii";
        } else {
          continue;
        }
        violate(std::move(v));
      }
    }
  }

  void step(const MoveInstr& in) {
    std::map<int, double> colEnd = cols_;
    std::map<int, double> rowEnd = rows_;
    auto apply = [&](const std::vector<LineMove>& ms, const std::map<int, double>& cur,
                     std::map<int, double>& end, const char* what) {
      std::set<int> seen;
      for (const auto& m : ms) {
        const auto it = cur.find(m.id);
        if (it == cur.end()) {
          structural(std::string("move of inactive ") + what + " " +
                     std::to_string(m.id));
          continue;
        }
        if (!seen.insert(m.id).second) {
          structural(std::string(what) + " " + std::to_string(m.id) +
                     " moved twice in one instruction");
          continue;
        }
        if (!near(m.begin, it->second)) {
          Violation v;
          v.rule = Rule::LineTornApart;
          v.lines = {m.id};
          v.distanceUm = std::abs(m.begin - it->second);
          v.detail = std::string(what) + " begins away from its tracked position";
          violate(std::move(v));
        }
        end[m.id] = m.end;
      }
    };
    apply(in.columns, cols_, colEnd, "column");
    apply(in.rows, rows_, rowEnd, "row");

    checkCrossing(cols_, colEnd, true);
    checkCrossing(rows_, rowEnd, false);
    checkSeparation(colEnd, true);
    checkSeparation(rowEnd, false);

    std::vector<bool> claimed(p_.numQubits, false);
    for (const auto& am : in.atoms) {
      if (!validQubit(am.qubit)) {
        structural("move claims unknown qubit " + std::to_string(am.qubit));
        continue;
      }
      if (claimed[am.qubit]) {
        structural("move claims qubit " + std::to_string(am.qubit) + " twice");
        continue;
      }
      claimed[am.qubit] = true;
      const auto& a = atoms_[am.qubit];
      if (!a.aod) {
        if (!near(am.begin, a.pos) || !near(am.end, a.pos)) {
          Violation v;
          v.rule = Rule::SlmMoved;
          v.qubits = {am.qubit};
          v.distanceUm = distance(am.end, a.pos);
          v.detail = "atom in an SLM trap is claimed to move";
          violate(std::move(v));
        }
        continue;
      }
      const Point end{colEnd.at(a.col), rowEnd.at(a.row)};
      if (!near(am.begin, a.pos) || !near(am.end, end)) {
        Violation v;
        v.rule = Rule::LineTornApart;
        v.qubits = {am.qubit};
        v.lines = {a.col, a.row};
        v.distanceUm = std::max(distance(am.begin, a.pos), distance(am.end, end));
        v.detail = "claimed trajectory leaves the atom's AOD trap";
        violate(std::move(v));
      }
    }

    double dmax = 0.0;
    cols_ = std::move(colEnd);
    rows_ = std::move(rowEnd);
    for (auto& a : atoms_) {
      if (a.aod) {
        const Point end = intersection(a);
        dmax = std::max(dmax, distance(a.pos, end));
        a.pos = end;
      }
    }
    if (in.durationUs + kTol < moveTime(dmax, p_.spec.phys)) {
      std::ostringstream os;
      os << "move lasts " << in.durationUs << " us, shorter than the "
         << moveTime(dmax, p_.spec.phys) << " us its longest displacement needs";
      warn(os.str());
    }
    if (!(in.durationUs >= 0)) {
      structural("negative move duration");
      return;
    }
    elapse(in.durationUs);
    trace.totalMoveUs += in.durationUs;
  }

  void checkCrossing(const std::map<int, double>& begin,
                     const std::map<int, double>& end, bool columns) {
    const double ds = p_.spec.phys.minSeparationUm;
    const int samples = std::max(1, opts_.samplesPerMove);
    for (auto i = begin.begin(); i != begin.end(); ++i) {
      for (auto j = std::next(i); j != begin.end(); ++j) {
        const double b = j->second - i->second;
        const double e = end.at(j->first) - end.at(i->first);
        if (std::abs(b) <= kTol) {
          continue;  // already coincident; separation rule covers it
        }
        bool crossed = (b > 0 && e < -kTol) || (b < 0 && e > kTol);
        bool closeMid = false;
        for (int k = 1; k < samples; ++k) {
          const double tau = static_cast<double>(k) / samples;
          const double m = b + (e - b) * tau;
          if ((b > 0 && m < -kTol) || (b < 0 && m > kTol)) {
            crossed = true;
          }
          if (std::abs(m) < ds - kTol) {
            closeMid = true;
          }
        }
        if (crossed) {
          Violation v;
          v.rule = Rule::LineCrossing;
          v.lines = {i->first, j->first};
          v.detail = std::string("AOD ") + (columns ? "columns" : "rows") +
                     " change order during a move";
          violate(std::move(v));
        } else if (closeMid && std::abs(e) >= ds - kTol) {
          warn(std::string("AOD ") + (columns ? "columns " : "rows ") +
               std::to_string(i->first) + " and " + std::to_string(j->first) +
               " pass closer than the minimum separation mid-move");
        }
      }
    }
  }

  void step(const ActivateInstr& in) {
    std::vector<int> newCols, newRows;
    auto add = [&](const std::vector<LinePos>& ls, std::map<int, double>& dst,
                   int bound, std::vector<int>& added, const char* what) {
      for (const auto& l : ls) {
        if (l.id < 0 || l.id >= bound) {
          structural(std::string(what) + " id " + std::to_string(l.id) +
                     " outside the architecture");
          continue;
        }
        if (dst.count(l.id)) {
          Violation v;
          v.rule = Rule::TransferIllegal;
          v.lines = {l.id};
          v.detail = std::string("activating ") + what + " that is already on";
          violate(std::move(v));
          continue;
        }
        dst[l.id] = l.um;
        added.push_back(l.id);
      }
    };
    add(in.columns, cols_, p_.spec.c, newCols, "a column");
    add(in.rows, rows_, p_.spec.r, newRows, "a row");
    checkSeparation(cols_, true);
    checkSeparation(rows_, false);

    // New traps: new columns against every row, new rows against every column.
    std::vector<std::pair<int, int>> fresh;
    for (int c : newCols) {
      for (const auto& [r, _] : rows_) {
        fresh.emplace_back(c, r);
      }
    }
    for (int r : newRows) {
      for (const auto& [c, _] : cols_) {
        if (std::find(newCols.begin(), newCols.end(), c) == newCols.end()) {
          fresh.emplace_back(c, r);
        }
      }
    }
    for (int q = 0; q < p_.numQubits; ++q) {
      auto& a = atoms_[q];
      if (a.aod) {
        continue;
      }
      for (const auto& [c, r] : fresh) {
        if (near(Point{cols_.at(c), rows_.at(r)}, a.pos)) {
          if (a.trap >= 0) {
            trapOwner_[a.trap] = -1;
          }
          a.trap = -1;
          a.aod = true;
          a.col = c;
          a.row = r;
          break;
        }
      }
    }
    transfer(in.durationUs);
  }

  void step(const DeactivateInstr& in) {
    std::set<int> offCols, offRows;
    auto take = [&](const std::vector<int>& ids, const std::map<int, double>& cur,
                    std::set<int>& off, const char* what) {
      for (int id : ids) {
        if (!cur.count(id)) {
          Violation v;
          v.rule = Rule::TransferIllegal;
          v.lines = {id};
          v.detail = std::string("deactivating ") + what + " that is not on";
          violate(std::move(v));
          continue;
        }
        off.insert(id);
      }
    };
    take(in.columns, cols_, offCols, "a column");
    take(in.rows, rows_, offRows, "a row");
    for (int q = 0; q < p_.numQubits; ++q) {
      auto& a = atoms_[q];
      if (!a.aod || (!offCols.count(a.col) && !offRows.count(a.row))) {
        continue;
      }
      a.aod = false;
      a.col = a.row = -1;
      const int t = findTrap(a.pos);
      if (t < 0) {
        Violation v;
        v.rule = Rule::TransferIllegal;
        v.qubits = {q};
        v.detail = "atom released where there is no SLM trap";
        violate(std::move(v));
        a.trap = -1;
        continue;
      }
      if (trapOwner_[t] >= 0) {
        Violation v;
        v.rule = Rule::TrapOverfilled;
        v.qubits = {trapOwner_[t], q};
        v.detail = "atom released into an occupied SLM trap";
        violate(std::move(v));
        a.trap = -1;
        continue;
      }
      trapOwner_[t] = q;
      a.trap = t;
    }
    for (int id : offCols) {
      cols_.erase(id);
    }
    for (int id : offRows) {
      rows_.erase(id);
    }
    transfer(in.durationUs);
  }

  void transfer(double us) {
    if (!(us >= 0)) {
      structural("negative transfer duration");
      return;
    }
    elapse(us);
    trace.totalTransferUs += us;
  }

  void elapse(double us) {
    for (auto& t : idle_) {
      t += us;
    }
  }

  void finalChecks() {
    idx_ = -1;
    for (int g = 0; g < c_->numGates(); ++g) {
      if (execCount_[g] != 1) {
        Violation v;
        v.rule = Rule::GateCoverage;
        v.gates = {g};
        v.detail = "gate executed " + std::to_string(execCount_[g]) + " times";
        violate(std::move(v));
      }
    }
    for (const auto& [a, b] : c_->dependencies()) {
      if (execCount_[a] != 1 || execCount_[b] != 1) {
        continue;
      }
      if (execStage_[a] >= execStage_[b]) {
        Violation v;
        v.rule = Rule::DependencyOrder;
        v.gates = {a, b};
        v.stage = execStage_[b];
        v.detail = "gate runs no later than a gate it depends on";
        violate(std::move(v));
      }
    }
  }

public:
  void finish() { trace.idleUs = idle_; }

private:
  const Program& p_;
  const Circuit* c_;
  VerifyOptions opts_;
  std::vector<AtomState> atoms_;
  std::vector<Point> traps_;
  std::vector<int> trapOwner_;
  std::map<int, double> cols_, rows_;
  std::vector<double> idle_;
  std::vector<int> execCount_, execStage_;
  int stage_ = 0;
  int idx_ = 0;
};

} // namespace

VerifyReport verify(const Program& p, const Circuit& c, const VerifyOptions& opts) {
  Interpreter it(p, &c, opts);
  it.run();
  return std::move(it.report);
}

Trace simulatePositions(const Program& p) {
  Interpreter it(p, nullptr, {});
  it.run();
  it.finish();
  if (!it.trace.structuralErrors.empty()) {
    throw IoError("cannot simulate program: " + it.trace.structuralErrors.front());
  }
  return std::move(it.trace);
}

} // namespace dpqa
