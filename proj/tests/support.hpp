#pragma once

// Shared fixtures and brute-force oracles for the unit and acceptance tests.
// Nothing here calls the solver or the encoder.

#include "dpqa/architecture.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/fidelity.hpp"
#include "dpqa/program.hpp"
#include "dpqa/verifier.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace dpqa::testing {

inline std::string dataPath(const std::string& name) {
  return std::string(DPQA_TEST_DATA) + "/" + name;
}

inline Circuit sixQubitCircuit() { return loadCircuitFile(dataPath("six_qubit.json")); }

/// Largest set of pairwise disjoint gates, by exhaustive search.
inline int bruteMatching(const std::vector<std::pair<int, int>>& edges) {
  int best = 0;
  std::function<void(std::size_t, std::set<int>&, int)> go =
      [&](std::size_t k, std::set<int>& used, int size) {
        best = std::max(best, size);
        if (k == edges.size() ||
            size + static_cast<int>(edges.size() - k) <= best) {
          return;
        }
        const auto [a, b] = edges[k];
        if (a != b && !used.count(a) && !used.count(b)) {
          used.insert(a);
          used.insert(b);
          go(k + 1, used, size + 1);
          used.erase(a);
          used.erase(b);
        }
        go(k + 1, used, size);
      };
  std::set<int> used;
  go(0, used, 0);
  return best;
}

inline std::vector<std::pair<int, int>> operands(const Circuit& c) {
  std::vector<std::pair<int, int>> out;
  for (const auto& g : c.gates()) {
    out.emplace_back(g.qLo, g.qHi);
  }
  return out;
}

/// Random circuit on n qubits with g gates on distinct-operand pairs.
inline Circuit randomCircuit(std::mt19937_64& rng, int n, int g, bool commutable) {
  std::uniform_int_distribution<int> q(0, n - 1);
  std::vector<std::pair<int, int>> ops;
  while (static_cast<int>(ops.size()) < g) {
    const int a = q(rng);
    const int b = q(rng);
    if (a != b) {
      ops.emplace_back(a, b);
    }
  }
  return Circuit(n, ops, commutable);
}

/// Lay out one stage on the site grid: gate pairs share a site, every other
/// qubit gets a site of its own, and sites are never reused. Returns false
/// when the grid is too small. Site centres are pitch apart, so pairs sit
/// within r_b and distinct sites are beyond 2.5 r_b.
inline bool placeStage(int n, const std::vector<std::pair<int, int>>& pairs,
                       const ArchSpec& spec) {
  std::vector<int> site(n, -1);
  int next = 0;
  for (const auto& [a, b] : pairs) {
    if (site[a] >= 0 || site[b] >= 0) {
      return false;
    }
    site[a] = site[b] = next++;
  }
  for (int q = 0; q < n; ++q) {
    if (site[q] < 0) {
      site[q] = next++;
    }
  }
  if (next > spec.x * spec.y) {
    return false;
  }
  const double rb = spec.phys.rydbergRadiusUm;
  const double offset = spec.phys.minSeparationUm / 4.0;
  auto pos = [&](int q) {
    const int s = site[q];
    // AOD partner sits a quarter separation off the SLM trap at the centre.
    const bool second = std::any_of(pairs.begin(), pairs.end(),
                                    [&](const auto& p) { return p.second == q; });
    const double d = second ? offset : 0.0;
    return Point{(s % spec.x) * spec.sitePitchUm + d, (s / spec.x) * spec.sitePitchUm + d};
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool gate = std::any_of(pairs.begin(), pairs.end(), [&](const auto& p) {
        return (p.first == i && p.second == j) || (p.first == j && p.second == i);
      });
      const double d = distance(pos(i), pos(j));
      if (gate ? d > rb : d < 2.5 * rb) {
        return false;
      }
    }
  }
  return true;
}

/// Smallest stage count over all gate-to-stage maps in which every stage has
/// disjoint operands, respects the dependencies, and places on the grid.
inline int bruteMinStages(const Circuit& c, const ArchSpec& spec) {
  const int G = c.numGates();
  if (G == 0) {
    return 1;
  }
  const auto deps = c.dependencies();
  for (int S = 1; S <= G; ++S) {
    std::vector<int> stage(G, 0);
    while (true) {
      bool ok = true;
      for (const auto& [a, b] : deps) {
        ok = ok && stage[a] < stage[b];
      }
      for (int s = 0; ok && s < S; ++s) {
        std::vector<std::pair<int, int>> pairs;
        std::set<int> used;
        for (int j = 0; j < G && ok; ++j) {
          if (stage[j] != s) {
            continue;
          }
          const auto& g = c.gate(j);
          ok = !used.count(g.qLo) && !used.count(g.qHi);
          used.insert(g.qLo);
          used.insert(g.qHi);
          pairs.emplace_back(g.qLo, g.qHi);
        }
        ok = ok && placeStage(c.numQubits(), pairs, spec);
      }
      if (ok) {
        return S;
      }
      int k = 0;
      while (k < G && ++stage[k] == S) {
        stage[k++] = 0;
      }
      if (k == G) {
        break;
      }
    }
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Hand-built parent program for the verifier mutants.
//
// Six qubits. q0 and q2 sit in SLM traps at sites (0,0) and (2,0); q1 and q3
// ride AOD columns 0 and 1 on row 0; q4 (column 2, row 1) and q5 (column 3,
// row 2) idle. Three stages: (q0,q1) and (q2,q3), then (q1,q2), then the
// first two pairs again.

inline Circuit parentCircuit() {
  return Circuit(6, {{0, 1}, {2, 3}, {1, 2}, {0, 1}, {2, 3}}, false,
                 {{0, 2}, {1, 2}, {2, 3}, {2, 4}});
}

struct ParentLayout {
  static constexpr double kCol[4] = {0.5, 54.5, 108.5, 162.5};
  static constexpr double kRow[3] = {0.5, 54.5, 108.5};
};

inline MoveInstr parentMove(const Program& p, std::vector<LineMove> cols,
                            std::vector<LineMove> rows,
                            const std::vector<Point>& from,
                            const std::vector<Point>& to) {
  MoveInstr mv;
  mv.columns = std::move(cols);
  mv.rows = std::move(rows);
  double dmax = 0.0;
  for (int q = 0; q < static_cast<int>(from.size()); ++q) {
    mv.atoms.push_back(AtomMove{q, from[q], to[q]});
    dmax = std::max(dmax, distance(from[q], to[q]));
  }
  mv.durationUs = moveTime(dmax, p.spec.phys);
  return mv;
}

inline Program parentProgram() {
  using L = ParentLayout;
  Program p;
  p.spec = defaultArchSpec();
  p.numQubits = 6;
  p.numStages = 3;

  InitInstr in;
  in.slmTraps = {Point{0, 0}, Point{54, 0}};
  for (int k = 0; k < 4; ++k) {
    in.columns.push_back(LinePos{k, L::kCol[k]});
  }
  for (int k = 0; k < 3; ++k) {
    in.rows.push_back(LinePos{k, L::kRow[k]});
  }
  const std::vector<Point> s0 = {
      {0, 0},
      {L::kCol[0], L::kRow[0]},
      {54, 0},
      {L::kCol[1], L::kRow[0]},
      {L::kCol[2], L::kRow[1]},
      {L::kCol[3], L::kRow[2]},
  };
  in.atoms = {
      InitAtom{0, false, 0, 0, s0[0], -1, -1},
      InitAtom{1, true, 0, 0, s0[1], 0, 0},
      InitAtom{2, false, 2, 0, s0[2], -1, -1},
      InitAtom{3, true, 2, 0, s0[3], 1, 0},
      InitAtom{4, true, 4, 2, s0[4], 2, 1},
      InitAtom{5, true, 6, 4, s0[5], 3, 2},
  };
  p.instructions.emplace_back(in);
  p.instructions.emplace_back(RydbergInstr{0, {0, 1}});

  // q1 joins q2 from the left, q3 steps one site to the right.
  std::vector<Point> s1 = s0;
  s1[1] = {52.5, 0.5};
  s1[3] = {81.5, 0.5};
  p.instructions.emplace_back(parentMove(
      p, {LineMove{0, 0.5, 52.5}, LineMove{1, 54.5, 81.5}}, {}, s0, s1));
  p.instructions.emplace_back(RydbergInstr{1, {2}});

  p.instructions.emplace_back(parentMove(
      p, {LineMove{0, 52.5, 0.5}, LineMove{1, 81.5, 54.5}}, {}, s1, s0));
  p.instructions.emplace_back(RydbergInstr{2, {3, 4}});
  return p;
}

/// Index of the first move of the parent (stage 0 -> 1).
inline constexpr int kParentMove1 = 2;
inline constexpr int kParentRydberg1 = 3;

inline MoveInstr& moveAt(Program& p, int idx) {
  return std::get<MoveInstr>(p.instructions.at(idx));
}

/// Set the claimed end of one atom in a move, and the start of its claim in
/// the next move so the trajectory stays continuous.
inline void reclaim(Program& p, int moveIdx, int qubit, Point end) {
  moveAt(p, moveIdx).atoms.at(qubit).end = end;
  for (std::size_t k = moveIdx + 1; k < p.instructions.size(); ++k) {
    if (auto* mv = std::get_if<MoveInstr>(&p.instructions[k])) {
      mv->atoms.at(qubit).begin = end;
      return;
    }
  }
}

inline void setLineEnd(std::vector<LineMove>& ls, int id, double begin, double end) {
  for (auto& l : ls) {
    if (l.id == id) {
      l.end = end;
      return;
    }
  }
  ls.push_back(LineMove{id, begin, end});
}

/// Same as setLineEnd for the following move's start of that line.
inline void setLineBegin(Program& p, int moveIdx, bool column, int id, double from,
                         double begin) {
  for (std::size_t k = moveIdx + 1; k < p.instructions.size(); ++k) {
    if (auto* mv = std::get_if<MoveInstr>(&p.instructions[k])) {
      auto& ls = column ? mv->columns : mv->rows;
      for (auto& l : ls) {
        if (l.id == id) {
          l.begin = begin;
          return;
        }
      }
      // The line did not move in the next move; send it back to where it was.
      ls.push_back(LineMove{id, begin, from});
      return;
    }
  }
}

struct Mutant {
  Rule rule;
  Program program;
};

/// One mutant of the parent per verifier rule, each breaking only that rule.
inline std::vector<Mutant> mutants() {
  using L = ParentLayout;
  std::vector<Mutant> out;
  const Program parent = parentProgram();
  const int m1 = kParentMove1;
  const int m2 = kParentMove1 + 2;

  {  // q5 loaded into q4's AOD trap
    Program p = parent;
    auto& in = std::get<InitInstr>(p.instructions[0]);
    in.atoms[5].col = 2;
    in.atoms[5].row = 1;
    in.atoms[5].pos = {L::kCol[2], L::kRow[1]};
    for (int k : {m1, m2}) {
      moveAt(p, k).atoms[5].begin = in.atoms[5].pos;
      moveAt(p, k).atoms[5].end = in.atoms[5].pos;
    }
    out.push_back({Rule::TrapOverfilled, p});
  }
  {  // SLM atom claimed to shift by 1 µm
    Program p = parent;
    moveAt(p, m1).atoms[0].end = {1, 0};
    out.push_back({Rule::SlmMoved, p});
  }
  {  // q1's claimed end leaves its column
    Program p = parent;
    moveAt(p, m1).atoms[1].end = {50, 0.5};
    out.push_back({Rule::LineTornApart, p});
  }
  {  // column 1 moves left past column 0
    Program p = parent;
    setLineEnd(moveAt(p, m1).columns, 1, 54.5, 30.5);
    reclaim(p, m1, 3, {30.5, 0.5});
    setLineBegin(p, m1, true, 1, 54.5, 30.5);
    out.push_back({Rule::LineCrossing, p});
  }
  {  // row 2 parks 1 µm from row 1
    Program p = parent;
    setLineEnd(moveAt(p, m1).rows, 2, 108.5, 55.5);
    reclaim(p, m1, 5, {L::kCol[3], 55.5});
    setLineBegin(p, m1, false, 2, 108.5, 55.5);
    out.push_back({Rule::MinSeparation, p});
  }
  {  // q1 stops 8.5 µm short of q2
    Program p = parent;
    setLineEnd(moveAt(p, m1).columns, 0, 0.5, 45.5);
    reclaim(p, m1, 1, {45.5, 0.5});
    setLineBegin(p, m1, true, 0, 0.5, 45.5);
    out.push_back({Rule::BlockadeUnsatisfied, p});
  }
  {  // idle q4 parks next to q3
    Program p = parent;
    setLineEnd(moveAt(p, m1).columns, 2, 108.5, 83.5);
    setLineEnd(moveAt(p, m1).rows, 1, 54.5, 2.5);
    reclaim(p, m1, 4, {83.5, 2.5});
    setLineBegin(p, m1, true, 2, 108.5, 83.5);
    setLineBegin(p, m1, false, 1, 54.5, 2.5);
    out.push_back({Rule::InteractionExactness, p});
  }
  {  // idle q4 parks about 17 µm from q3
    Program p = parent;
    setLineEnd(moveAt(p, m1).columns, 2, 108.5, 90);
    setLineEnd(moveAt(p, m1).rows, 1, 54.5, 15.5);
    reclaim(p, m1, 4, {90, 15.5});
    setLineBegin(p, m1, true, 2, 108.5, 90);
    setLineBegin(p, m1, false, 1, 54.5, 15.5);
    out.push_back({Rule::StrayInteraction, p});
  }
  {  // switching off a column that was never on
    Program p = parent;
    p.instructions.insert(p.instructions.begin() + m1 + 1, DeactivateInstr{{9}, {}, 0.0});
    out.push_back({Rule::TransferIllegal, p});
  }
  {  // gate 0 in the ledger twice
    Program p = parent;
    std::get<RydbergInstr>(p.instructions[1]).gates = {0, 0, 1};
    out.push_back({Rule::GateCoverage, p});
  }
  {  // the two (q0,q1) gates swap stages
    Program p = parent;
    std::get<RydbergInstr>(p.instructions[1]).gates = {3, 1};
    std::get<RydbergInstr>(p.instructions[m2 + 1]).gates = {0, 4};
    out.push_back({Rule::DependencyOrder, p});
  }
  return out;
}

} // namespace dpqa::testing
