#include "dpqa/codegen.hpp"

#include "dpqa/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace dpqa {

Point siteCenter(int x, int y, const ArchSpec& spec) {
  return Point{x * spec.sitePitchUm, y * spec.sitePitchUm};
}

double stackOffset(int rank, int stack, double minSeparationUm) {
  // Quarter-pitch shift keeps AOD traps off the SLM trap at the centre.
  return (rank - (stack - 1) / 2.0) * minSeparationUm + minSeparationUm / 4.0;
}

namespace {

struct Lines {
  std::map<int, double> cols;
  std::map<int, double> rows;
};

/// Solver line index -> program line id, for the current stage.
struct LineIds {
  std::map<int, int> cols;
  std::map<int, int> rows;
};

struct Atom {
  Point pos;
  bool aod = false;
  int col = -1;
  int row = -1;
};

class Lowering {
public:
  Lowering(const Assignment& asg, const Circuit& c, const ArchSpec& spec)
      : asg_(asg), c_(c), spec_(spec) {}

  Program run() {
    const int N = asg_.numQubits;
    const int S = asg_.numStages;
    if (N != c_.numQubits()) {
      throw CodegenError("assignment and circuit disagree on the qubit count");
    }
    if (static_cast<int>(asg_.gateStage.size()) != c_.numGates()) {
      throw CodegenError("assignment and circuit disagree on the gate count");
    }
    if (S < 1) {
      throw CodegenError("assignment has no stages");
    }
    for (int st : asg_.gateStage) {
      if (st < 0 || st >= S) {
        throw CodegenError("gate scheduled outside the assignment's stages");
      }
    }
    for (int i = 0; i < N; ++i) {
      for (int s = 0; s + 1 < S; ++s) {
        const auto& a = asg_.at(i, s);
        const auto& b = asg_.at(i, s + 1);
        if (!a.aod && !b.aod && (a.x != b.x || a.y != b.y)) {
          throw CodegenError("qubit " + std::to_string(i) +
                             " changes site while held by the SLM");
        }
      }
    }

    prog_.spec = spec_;
    prog_.numQubits = N;
    prog_.numStages = S;

    emitInit();
    emitRydberg(0);
    for (int s = 0; s + 1 < S; ++s) {
      boundary(s);
      emitRydberg(s + 1);
    }
    return std::move(prog_);
  }

private:
  std::vector<int> aodAt(int s) const {
    std::vector<int> out;
    for (int i = 0; i < asg_.numQubits; ++i) {
      if (asg_.at(i, s).aod) {
        out.push_back(i);
      }
    }
    return out;
  }

  /// Line coordinates for AOD atoms `atoms`, with sites read at `siteStage`
  /// and line indices at `lineStage`. Indices are ranked within a site and
  /// then mapped to program line ids through `ids`.
  Lines place(const std::vector<int>& atoms, int siteStage, int lineStage,
              const LineIds& ids) const {
    std::map<int, int> colSite, rowSite;
    auto bind = [&](std::map<int, int>& m, int line, int site, const char* what) {
      const auto [it, fresh] = m.emplace(line, site);
      if (!fresh && it->second != site) {
        std::ostringstream msg;
        msg << "inconsistent assignment: AOD " << what << ' ' << line
            << " sits at two site coordinates at stage " << siteStage;
        throw CodegenError(msg.str());
      }
    };
    for (int i : atoms) {
      const auto& ls = asg_.at(i, lineStage);
      const auto& ss = asg_.at(i, siteStage);
      bind(colSite, ls.col, ss.x, "column");
      bind(rowSite, ls.row, ss.y, "row");
    }
    Lines out;
    auto rank = [&](const std::map<int, int>& m, int stack, const std::map<int, int>& id,
                    std::map<int, double>& dst, const char* what) {
      std::map<int, std::vector<int>> bySite;
      for (const auto& [line, site] : m) {
        bySite[site].push_back(line);  // map order: ascending line id
      }
      for (const auto& [site, ls] : bySite) {
        if (static_cast<int>(ls.size()) > stack) {
          throw CodegenError(std::string("more AOD ") + what +
                             "s at one site coordinate than the stacking factor");
        }
        for (std::size_t k = 0; k < ls.size(); ++k) {
          dst[id.at(ls[k])] = site * spec_.sitePitchUm +
                       stackOffset(static_cast<int>(k), stack,
                                   spec_.phys.minSeparationUm);
        }
      }
    };
    rank(colSite, spec_.colStack, ids.cols, out.cols, "column");
    rank(rowSite, spec_.rowStack, ids.rows, out.rows, "row");
    return out;
  }

  Point aodPos(const Atom& a) const {
    return Point{cur_.cols.at(a.col), cur_.rows.at(a.row)};
  }

  void emitInit() {
    std::set<std::pair<int, int>> slmSites;
    for (int i = 0; i < asg_.numQubits; ++i) {
      for (int s = 0; s < asg_.numStages; ++s) {
        const auto& st = asg_.at(i, s);
        if (!st.aod) {
          slmSites.emplace(st.x, st.y);
        }
      }
    }
    InitInstr in;
    for (const auto& [x, y] : slmSites) {
      in.slmTraps.push_back(siteCenter(x, y, spec_));
    }
    for (int i : aodAt(0)) {
      ids_.cols[asg_.at(i, 0).col] = asg_.at(i, 0).col;
      ids_.rows[asg_.at(i, 0).row] = asg_.at(i, 0).row;
    }
    cur_ = place(aodAt(0), 0, 0, ids_);
    for (const auto& [id, um] : cur_.cols) {
      in.columns.push_back(LinePos{id, um});
    }
    for (const auto& [id, um] : cur_.rows) {
      in.rows.push_back(LinePos{id, um});
    }
    atoms_.resize(asg_.numQubits);
    for (int i = 0; i < asg_.numQubits; ++i) {
      const auto& st = asg_.at(i, 0);
      auto& a = atoms_[i];
      a.aod = st.aod;
      if (st.aod) {
        a.col = ids_.cols.at(st.col);
        a.row = ids_.rows.at(st.row);
        a.pos = aodPos(a);
      } else {
        a.pos = siteCenter(st.x, st.y, spec_);
      }
      in.atoms.push_back(InitAtom{i, a.aod, st.x, st.y, a.pos, a.aod ? a.col : -1,
                                  a.aod ? a.row : -1});
    }
    prog_.instructions.emplace_back(std::move(in));
  }

  void emitRydberg(int s) {
    prog_.instructions.emplace_back(RydbergInstr{s, asg_.gatesAt(s)});
  }

  /// Move every active line to `to` (lines absent from `to` stay).
  void moveTo(const Lines& to) {
    MoveInstr mv;
    auto diff = [](const std::map<int, double>& from, const std::map<int, double>& dst,
                   std::vector<LineMove>& out) {
      for (const auto& [id, um] : from) {
        const auto it = dst.find(id);
        if (it != dst.end() && std::abs(it->second - um) > 1e-9) {
          out.push_back(LineMove{id, um, it->second});
        }
      }
    };
    diff(cur_.cols, to.cols, mv.columns);
    diff(cur_.rows, to.rows, mv.rows);
    if (mv.columns.empty() && mv.rows.empty()) {
      return;
    }
    for (const auto& l : mv.columns) {
      cur_.cols[l.id] = l.end;
    }
    for (const auto& l : mv.rows) {
      cur_.rows[l.id] = l.end;
    }
    double dmax = 0.0;
    for (int i = 0; i < asg_.numQubits; ++i) {
      auto& a = atoms_[i];
      const Point end = a.aod ? aodPos(a) : a.pos;
      dmax = std::max(dmax, distance(a.pos, end));
      mv.atoms.push_back(AtomMove{i, a.pos, end});
      a.pos = end;
    }
    mv.durationUs = moveTime(dmax, spec_.phys);
    prog_.instructions.emplace_back(std::move(mv));
  }

  void boundary(int s) {
    const auto fromAod = aodAt(s);
    const Lines target = place(fromAod, s + 1, s, ids_);
    moveTo(target);

    std::set<int> holding(fromAod.begin(), fromAod.end());
    auto lone = [&](int i, bool column) {
      for (int j : holding) {
        if (j != i && (column ? atoms_[j].col == atoms_[i].col
                              : atoms_[j].row == atoms_[i].row)) {
          return false;
        }
      }
      return true;
    };

    for (int i : fromAod) {
      if (asg_.at(i, s + 1).aod) {
        continue;
      }
      const bool loneCol = lone(i, true);
      const bool loneRow = lone(i, false);
      if (!loneCol && !loneRow) {
        throw CodegenError("qubit " + std::to_string(i) +
                           " cannot be dropped: it shares both of its AOD lines");
      }
      auto& a = atoms_[i];
      const auto& st = asg_.at(i, s + 1);
      const Point centre = siteCenter(st.x, st.y, spec_);
      Lines aligned = cur_;
      aligned.cols[a.col] = centre.x;
      aligned.rows[a.row] = centre.y;
      moveTo(aligned);

      DeactivateInstr off;
      off.durationUs = spec_.phys.transferTimeUs;
      if (loneCol) {
        off.columns.push_back(a.col);
        cur_.cols.erase(a.col);
      }
      if (loneRow) {
        off.rows.push_back(a.row);
        cur_.rows.erase(a.row);
      }
      prog_.instructions.emplace_back(std::move(off));
      holding.erase(i);
      a.aod = false;
      a.col = a.row = -1;
      moveTo(target);
    }

    const auto toAod = aodAt(s + 1);
    const LineIds next = nextIds(s, toAod);
    const Lines final = place(toAod, s + 1, s + 1, next);
    for (int i : toAod) {
      if (asg_.at(i, s).aod) {
        continue;
      }
      const auto& st = asg_.at(i, s + 1);
      const Point centre = siteCenter(st.x, st.y, spec_);
      const int colId = next.cols.at(st.col);
      const int rowId = next.rows.at(st.row);
      const bool newCol = !cur_.cols.count(colId);
      const bool newRow = !cur_.rows.count(rowId);
      if (!newCol && !newRow) {
        throw CodegenError("qubit " + std::to_string(i) +
                           " cannot be picked up: both of its AOD lines are in use");
      }
      Lines aligned = cur_;
      if (!newCol) {
        aligned.cols[colId] = centre.x;
      }
      if (!newRow) {
        aligned.rows[rowId] = centre.y;
      }
      moveTo(aligned);

      ActivateInstr on;
      on.durationUs = spec_.phys.transferTimeUs;
      if (newCol) {
        on.columns.push_back(LinePos{colId, centre.x});
        cur_.cols[colId] = centre.x;
      }
      if (newRow) {
        on.rows.push_back(LinePos{rowId, centre.y});
        cur_.rows[rowId] = centre.y;
      }
      prog_.instructions.emplace_back(std::move(on));
      auto& a = atoms_[i];
      a.aod = true;
      a.col = colId;
      a.row = rowId;
      holding.insert(i);
      moveTo(final);
    }

    moveTo(final);
    auto sameKeys = [](const std::map<int, double>& a, const std::map<int, double>& b) {
      return a.size() == b.size() &&
             std::equal(a.begin(), a.end(), b.begin(),
                        [](const auto& l, const auto& r) { return l.first == r.first; });
    };
    if (!sameKeys(cur_.cols, final.cols) || !sameKeys(cur_.rows, final.rows)) {
      throw CodegenError("active AOD lines after stage " + std::to_string(s) +
                         " do not match the lines the next stage uses");
    }
    ids_ = next;
  }

  /// Line ids for stage s+1. A line keeps its id while it carries an atom,
  /// even if the solver renumbered it; lines opened at this boundary get
  /// their own index when it is free, else the lowest free id.
  LineIds nextIds(int s, const std::vector<int>& toAod) const {
    LineIds next;
    auto link = [&](std::map<int, int>& m, int label, int id, const char* what) {
      const auto [it, fresh] = m.emplace(label, id);
      if (!fresh && it->second != id) {
        throw CodegenError(std::string("inconsistent assignment: two AOD ") + what +
                           "s merge after stage " + std::to_string(s));
      }
    };
    for (int i : toAod) {
      if (asg_.at(i, s).aod) {
        const auto& st = asg_.at(i, s + 1);
        link(next.cols, st.col, atoms_[i].col, "column");
        link(next.rows, st.row, atoms_[i].row, "row");
      }
    }
    auto distinct = [&](const std::map<int, int>& m, const char* what) {
      std::set<int> seen;
      for (const auto& [label, id] : m) {
        if (!seen.insert(id).second) {
          throw CodegenError(std::string("inconsistent assignment: an AOD ") + what +
                             " splits after stage " + std::to_string(s));
        }
      }
    };
    distinct(next.cols, "column");
    distinct(next.rows, "row");
    auto open = [&](std::map<int, int>& m, const std::map<int, double>& active,
                    int label, int bound) {
      if (m.count(label)) {
        return;
      }
      std::set<int> used;
      for (const auto& [id, um] : active) {
        used.insert(id);
      }
      for (const auto& [l, id] : m) {
        used.insert(id);
      }
      int id = label;
      if (used.count(id)) {
        id = 0;
        while (used.count(id)) {
          ++id;
        }
      }
      if (id >= bound) {
        throw CodegenError("no free AOD line id after stage " + std::to_string(s));
      }
      m[label] = id;
    };
    for (int i : toAod) {
      if (!asg_.at(i, s).aod) {
        const auto& st = asg_.at(i, s + 1);
        open(next.cols, cur_.cols, st.col, spec_.c);
        open(next.rows, cur_.rows, st.row, spec_.r);
      }
    }
    return next;
  }

  const Assignment& asg_;
  const Circuit& c_;
  const ArchSpec& spec_;
  Program prog_;
  Lines cur_;
  LineIds ids_;
  std::vector<Atom> atoms_;
};

} // namespace

Program lower(const Assignment& asg, const Circuit& c, const ArchSpec& spec) {
  return Lowering(asg, c, spec).run();
}

std::vector<Frame> animationFrames(const Program& p, int framesPerMove) {
  if (framesPerMove < 1) {
    throw std::invalid_argument("frames per move must be at least 1");
  }
  std::vector<Frame> frames;
  std::vector<Point> pos(p.numQubits);
  for (std::size_t k = 0; k < p.instructions.size(); ++k) {
    const auto& ins = p.instructions[k];
    if (const auto* in = std::get_if<InitInstr>(&ins)) {
      for (const auto& a : in->atoms) {
        if (a.qubit >= 0 && a.qubit < p.numQubits) {
          pos[a.qubit] = a.pos;
        }
      }
      frames.push_back(Frame{static_cast<int>(k), 0.0, pos});
    } else if (const auto* mv = std::get_if<MoveInstr>(&ins)) {
      for (int f = 0; f <= framesPerMove; ++f) {
        const double tau = static_cast<double>(f) / framesPerMove;
        std::vector<Point> at = pos;
        for (const auto& a : mv->atoms) {
          if (a.qubit < 0 || a.qubit >= p.numQubits) {
            continue;
          }
          at[a.qubit] = f == framesPerMove
                            ? a.end
                            : Point{a.begin.x + (a.end.x - a.begin.x) * tau,
                                    a.begin.y + (a.end.y - a.begin.y) * tau};
        }
        frames.push_back(Frame{static_cast<int>(k), tau, at});
      }
      for (const auto& a : mv->atoms) {
        if (a.qubit >= 0 && a.qubit < p.numQubits) {
          pos[a.qubit] = a.end;
        }
      }
    }
  }
  return frames;
}

Json toJson(const std::vector<Frame>& frames) {
  Json arr = Json::array();
  for (const auto& f : frames) {
    Json o;
    o["instruction"] = f.instruction;
    o["tau"] = f.tau;
    Json ps = Json::array();
    for (auto pt : f.positions) {
      ps.push_back(Json::array({pt.x, pt.y}));
    }
    o["positions"] = std::move(ps);
    arr.push_back(std::move(o));
  }
  return arr;
}

std::string frameSvg(const Program& p, const Frame& f) {
  const double pitch = p.spec.sitePitchUm;
  const double w = p.spec.x * pitch;
  const double h = p.spec.y * pitch;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -pitch / 2 << ' '
     << -pitch / 2 << ' ' << w << ' ' << h << "\">\n";
  for (int x = 0; x < p.spec.x; ++x) {
    for (int y = 0; y < p.spec.y; ++y) {
      os << "<circle cx=\"" << x * pitch << "\" cy=\"" << y * pitch
         << "\" r=\"" << p.spec.phys.rydbergRadiusUm
         << "\" fill=\"none\" stroke=\"#ddd\" stroke-width=\"0.3\"/>\n";
    }
  }
  for (std::size_t q = 0; q < f.positions.size(); ++q) {
    const auto pt = f.positions[q];
    os << "<circle cx=\"" << pt.x << "\" cy=\"" << pt.y
       << "\" r=\"1.2\" fill=\"#1f4e9c\"/><text x=\"" << pt.x + 1.5 << "\" y=\""
       << pt.y - 1.5 << "\" font-size=\"3\">q" << q << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace dpqa
