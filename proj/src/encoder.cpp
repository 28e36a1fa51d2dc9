#include "dpqa/encoder.hpp"

#include <algorithm>
#include <string>

namespace dpqa {

using smt::Expr;
using smt::Sort;
using smt::VarId;

const char* familyName(Family f) {
  switch (f) {
  case Family::Bounds: return "bounds";
  case Family::StationarySlm: return "stationary-slm";
  case Family::AodWholeLines: return "aod-whole-lines";
  case Family::SiteOrder: return "site-order";
  case Family::NoCrossing: return "no-crossing";
  case Family::MaxStacking: return "max-stacking";
  case Family::FixedArray: return "fixed-array";
  case Family::TransferSite: return "transfer-site";
  case Family::TransferLines: return "transfer-lines";
  case Family::Collision: return "collision";
  case Family::Dependency: return "dependency";
  case Family::Connectivity: return "connectivity";
  case Family::OneAtomOneTrap: return "one-atom-one-trap";
  case Family::Exactness: return "exactness";
  case Family::ExactnessEmpty: return "exactness-empty";
  case Family::Reachability: return "reachability";
  case Family::Cardinality: return "cardinality";
  case Family::Pin: return "pin";
  }
  return "?";
}

std::size_t Model::coreVariableCount() const {
  std::size_t n = 0;
  for (const auto& v : arena_.vars()) {
    n += v.auxiliary ? 0 : 1;
  }
  return n;
}

std::size_t Model::auxiliaryVariableCount() const {
  return arena_.vars().size() - coreVariableCount();
}

std::map<Family, std::size_t> Model::familyCounts() const {
  std::map<Family, std::size_t> out;
  for (const auto& a : assertions_) {
    ++out[a.family];
  }
  return out;
}

std::string Model::toSmtLib2() const {
  std::string out = "(set-logic QF_LIA)\n";
  for (const auto& v : arena_.vars()) {
    out += "(declare-fun ";
    out += v.name;
    out += v.sort == Sort::Int ? " () Int)\n" : " () Bool)\n";
  }
  bool first = true;
  Family current = Family::Bounds;
  for (const auto& a : assertions_) {
    if (first || a.family != current) {
      out += "; ";
      out += familyName(a.family);
      out += '\n';
      current = a.family;
      first = false;
    }
    out += "(assert ";
    arena_.print(a.expr, out);
    out += ")\n";
  }
  return out;
}

std::vector<std::size_t>
Model::violatedAssertions(std::span<const std::int64_t> values) const {
  if (values.size() != arena_.vars().size()) {
    throw EncodeError("assignment size does not match the model");
  }
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < assertions_.size(); ++k) {
    if (arena_.evaluate(assertions_[k].expr, values) == 0) {
      bad.push_back(k);
    }
  }
  return bad;
}

namespace {

/// Expression helpers over one model under construction.
class Builder {
public:
  Builder(smt::ExprArena& ar, const VarTable& vt) : ar_(ar), vt_(vt) {}

  Expr x(int i, int s) { return ar_.var(vt_.x[vt_.at(i, s)]); }
  Expr y(int i, int s) { return ar_.var(vt_.y[vt_.at(i, s)]); }
  Expr a(int i, int s) { return ar_.var(vt_.a[vt_.at(i, s)]); }
  Expr c(int i, int s) { return ar_.var(vt_.c[vt_.at(i, s)]); }
  Expr r(int i, int s) { return ar_.var(vt_.r[vt_.at(i, s)]); }
  Expr t(int k) { return ar_.var(vt_.t[k]); }
  Expr k(std::int64_t v) { return ar_.intConst(v); }

  Expr colocated(int i, int j, int s) {
    return ar_.land({ar_.eq(x(i, s), x(j, s)), ar_.eq(y(i, s), y(j, s))});
  }

  /// Gate k runs at stage s (and is executed, in partial models).
  Expr runsAt(int gk, int s) {
    Expr at = ar_.eq(t(gk), k(s));
    if (!vt_.executed.empty()) {
      return ar_.land({ar_.var(vt_.executed[gk]), at});
    }
    return at;
  }

  Expr inRange(Expr v, int lo, int hi) {
    return ar_.land({ar_.le(k(lo), v), ar_.lt(v, k(hi))});
  }

private:
  smt::ExprArena& ar_;
  const VarTable& vt_;
};

} // namespace

Model buildModel(const Circuit& circuit, const ArchSpec& spec, int stages,
                 const EncodeOptions& options) {
  if (stages < 1) {
    throw EncodeError("stage count must be at least 1");
  }
  requireValid(spec);
  if (options.pinnedStage0 && stages < 2) {
    throw EncodeError("a pinned model needs at least two stages");
  }

  Model m;
  m.options_ = options;
  m.boundX_ = spec.x;
  m.boundY_ = spec.y;
  m.boundC_ = spec.c;
  m.boundR_ = spec.r;

  const int N = circuit.numQubits();
  const int S = stages;
  auto& vt = m.vars_;
  auto& ar = m.arena_;
  vt.numQubits = N;
  vt.numStages = S;

  if (options.gateSubset) {
    vt.gateIds = *options.gateSubset;
    std::sort(vt.gateIds.begin(), vt.gateIds.end());
    if (std::adjacent_find(vt.gateIds.begin(), vt.gateIds.end()) !=
        vt.gateIds.end()) {
      throw EncodeError("gate subset lists a gate twice");
    }
    for (int id : vt.gateIds) {
      if (id < 0 || id >= circuit.numGates()) {
        throw EncodeError("gate subset references an unknown gate");
      }
    }
  } else {
    vt.gateIds.resize(circuit.numGates());
    for (int j = 0; j < circuit.numGates(); ++j) {
      vt.gateIds[j] = j;
    }
  }
  const int G = static_cast<int>(vt.gateIds.size());
  std::vector<int> modelIndex(circuit.numGates(), -1);
  for (int k = 0; k < G; ++k) {
    modelIndex[vt.gateIds[k]] = k;
  }

  const std::size_t NS = static_cast<std::size_t>(N) * S;
  for (auto* v : {&vt.x, &vt.y, &vt.a, &vt.c, &vt.r}) {
    v->resize(NS);
  }
  for (int i = 0; i < N; ++i) {
    for (int s = 0; s < S; ++s) {
      const auto suffix = "_" + std::to_string(i) + "_" + std::to_string(s);
      const auto at = vt.at(i, s);
      vt.x[at] = ar.declare("x" + suffix, Sort::Int);
      vt.y[at] = ar.declare("y" + suffix, Sort::Int);
      vt.a[at] = ar.declare("a" + suffix, Sort::Bool);
      vt.c[at] = ar.declare("c" + suffix, Sort::Int);
      vt.r[at] = ar.declare("r" + suffix, Sort::Int);
    }
  }
  for (int k = 0; k < G; ++k) {
    vt.t.push_back(ar.declare("t_" + std::to_string(vt.gateIds[k]), Sort::Int));
  }
  if (options.partial) {
    for (int k = 0; k < G; ++k) {
      vt.executed.push_back(
          ar.declare("e_" + std::to_string(vt.gateIds[k]), Sort::Bool, true));
    }
  }

  Builder b(ar, vt);
  auto emit = [&m](Expr e, Family f) {
    if (!m.arena_.isTrue(e)) {
      m.assertions_.push_back(Assertion{e, f});
    }
  };

  // Bounds.
  for (int i = 0; i < N; ++i) {
    for (int s = 0; s < S; ++s) {
      emit(b.inRange(b.x(i, s), 0, spec.x), Family::Bounds);
      emit(b.inRange(b.y(i, s), 0, spec.y), Family::Bounds);
      emit(b.inRange(b.c(i, s), 0, spec.c), Family::Bounds);
      emit(b.inRange(b.r(i, s), 0, spec.r), Family::Bounds);
    }
  }
  const int tLo = options.pinnedStage0 ? 1 : 0;
  for (int k = 0; k < G; ++k) {
    emit(b.inRange(b.t(k), tLo, S), Family::Bounds);
  }

  // SLM atoms stay put; AOD atoms keep their lines.
  for (int i = 0; i < N; ++i) {
    for (int s = 0; s + 1 < S; ++s) {
      emit(ar.implies(ar.lnot(b.a(i, s)),
                      ar.land({ar.eq(b.x(i, s + 1), b.x(i, s)),
                               ar.eq(b.y(i, s + 1), b.y(i, s))})),
           Family::StationarySlm);
    }
  }
  for (int i = 0; i < N; ++i) {
    for (int s = 0; s + 1 < S; ++s) {
      emit(ar.implies(b.a(i, s),
                      ar.land({ar.eq(b.c(i, s + 1), b.c(i, s)),
                               ar.eq(b.r(i, s + 1), b.r(i, s))})),
           Family::AodWholeLines);
    }
  }

  // Strict site order forces strict line order, for every ordered pair.
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) {
        continue;
      }
      for (int s = 0; s < S; ++s) {
        emit(ar.implies(ar.lt(b.x(i, s), b.x(j, s)),
                        ar.lt(b.c(i, s), b.c(j, s))),
             Family::SiteOrder);
        emit(ar.implies(ar.lt(b.y(i, s), b.y(j, s)),
                        ar.lt(b.r(i, s), b.r(j, s))),
             Family::SiteOrder);
      }
    }
  }

  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) {
        continue;
      }
      for (int s = 0; s + 1 < S; ++s) {
        const Expr both = ar.land({b.a(i, s), b.a(j, s)});
        emit(ar.implies(ar.land({both, ar.lt(b.c(i, s), b.c(j, s))}),
                        ar.le(b.x(i, s + 1), b.x(j, s + 1))),
             Family::NoCrossing);
        emit(ar.implies(ar.land({both, ar.lt(b.r(i, s), b.r(j, s))}),
                        ar.le(b.y(i, s + 1), b.y(j, s + 1))),
             Family::NoCrossing);
      }
    }
  }

  // Stacking window, line indices read one stage back (stage 0 reads itself).
  auto stacking = [&](int i, int j, int p, int s) {
    const Expr both = ar.land({b.a(i, p), b.a(j, p)});
    emit(ar.implies(ar.land({both, ar.ge(ar.sub(b.c(i, p), b.c(j, p)),
                                         b.k(spec.colStack))}),
                    ar.gt(b.x(i, s), b.x(j, s))),
         Family::MaxStacking);
    emit(ar.implies(ar.land({both, ar.ge(ar.sub(b.r(i, p), b.r(j, p)),
                                         b.k(spec.rowStack))}),
                    ar.gt(b.y(i, s), b.y(j, s))),
         Family::MaxStacking);
  };
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) {
        continue;
      }
      for (int s = 0; s < S; ++s) {
        stacking(i, j, s == 0 ? 0 : s - 1, s);
        // A line picked up at this boundary has no AOD history at s-1.
        if (options.allowTransfer && s > 0) {
          stacking(i, j, s, s);
        }
      }
    }
  }

  if (!options.allowTransfer) {
    for (int i = 0; i < N; ++i) {
      for (int s = 1; s < S; ++s) {
        emit(ar.eq(b.a(i, s), b.a(i, 0)), Family::FixedArray);
      }
    }
  } else {
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) {
        for (int s = 0; s + 1 < S; ++s) {
          emit(ar.implies(b.colocated(i, j, s + 1),
                          ar.land({ar.eq(b.a(i, s + 1), b.a(i, s)),
                                   ar.eq(b.a(j, s + 1), b.a(j, s))})),
               Family::TransferSite);
        }
      }
    }
    // A transfer switches one line off or on while it sits on the SLM trap:
    // the atom must be alone on that line, and no other line of the same
    // orientation may share the site coordinate, so that the line can be
    // centred on the trap without approaching its neighbours.
    for (int i = 0; i < N; ++i) {
      for (int s = 0; s + 1 < S; ++s) {
        for (int p : {s, s + 1}) {
          const Expr change = p == s ? ar.land({b.a(i, s), ar.lnot(b.a(i, s + 1))})
                                     : ar.land({ar.lnot(b.a(i, s)), b.a(i, s + 1)});
          std::vector<Expr> loneCol, loneRow, sepX, sepY;
          for (int j = 0; j < N; ++j) {
            if (j == i) {
              continue;
            }
            loneCol.push_back(
                ar.implies(b.a(j, p), ar.ne(b.c(j, p), b.c(i, p))));
            loneRow.push_back(
                ar.implies(b.a(j, p), ar.ne(b.r(j, p), b.r(i, p))));
            sepX.push_back(ar.implies(
                ar.land({b.a(j, p), ar.eq(b.x(j, s + 1), b.x(i, s + 1))}),
                ar.eq(b.c(j, p), b.c(i, p))));
            sepY.push_back(ar.implies(
                ar.land({b.a(j, p), ar.eq(b.y(j, s + 1), b.y(i, s + 1))}),
                ar.eq(b.r(j, p), b.r(i, p))));
          }
          emit(ar.implies(change, ar.lor({ar.land(loneCol), ar.land(loneRow)})),
               Family::TransferLines);
          emit(ar.implies(change, ar.land({ar.land(sepX), ar.land(sepY)})),
               Family::TransferLines);
        }
      }
    }
  }

  // Circuit-dependent families, over the gates of this model.
  for (int k = 0; k < G; ++k) {
    for (int l = k + 1; l < G; ++l) {
      const auto& g1 = circuit.gate(vt.gateIds[k]);
      const auto& g2 = circuit.gate(vt.gateIds[l]);
      if (!g1.sharesQubit(g2)) {
        continue;
      }
      Expr same = ar.eq(b.t(k), b.t(l));
      if (options.partial) {
        same = ar.land({ar.var(vt.executed[k]), ar.var(vt.executed[l]), same});
      }
      emit(ar.lnot(same), Family::Collision);
    }
  }

  for (const auto& [from, to] : circuit.dependencies()) {
    const int kf = modelIndex[from];
    const int kt = modelIndex[to];
    if (kf < 0 || kt < 0) {
      continue;  // one side already ran in an earlier step
    }
    Expr before = ar.lt(b.t(kf), b.t(kt));
    if (options.partial) {
      before = ar.implies(ar.var(vt.executed[kt]),
                          ar.land({ar.var(vt.executed[kf]), before}));
    }
    emit(before, Family::Dependency);
  }

  for (int k = 0; k < G; ++k) {
    const auto& g = circuit.gate(vt.gateIds[k]);
    for (int s = tLo; s < S; ++s) {
      emit(ar.implies(b.runsAt(k, s), b.colocated(g.qLo, g.qHi, s)),
           Family::Connectivity);
    }
  }

  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      for (int s = 0; s < S; ++s) {
        emit(ar.implies(ar.land({b.a(i, s), b.a(j, s)}),
                        ar.lor({ar.ne(b.c(i, s), b.c(j, s)),
                                ar.ne(b.r(i, s), b.r(j, s))})),
             Family::OneAtomOneTrap);
        emit(ar.implies(ar.land({ar.lnot(b.a(i, s)), ar.lnot(b.a(j, s))}),
                        ar.lor({ar.ne(b.x(i, s), b.x(j, s)),
                                ar.ne(b.y(i, s), b.y(j, s))})),
             Family::OneAtomOneTrap);
      }
    }
  }

  const auto rho = interactionMap(circuit, vt.gateIds);
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const auto it = rho.find({i, j});
      for (int s = tLo; s < S; ++s) {
        if (it == rho.end()) {
          emit(ar.lnot(b.colocated(i, j, s)), Family::ExactnessEmpty);
          continue;
        }
        std::vector<Expr> any;
        for (int id : it->second) {
          any.push_back(b.runsAt(modelIndex[id], s));
        }
        emit(ar.implies(b.colocated(i, j, s), ar.lor(any)), Family::Exactness);
      }
    }
  }

  if (options.reachability) {
    auto window = [&](Expr u, Expr v, int stack) {
      return ar.land({ar.lt(ar.sub(u, v), b.k(stack)),
                      ar.lt(ar.sub(v, u), b.k(stack))});
    };
    for (int k = 0; k < G; ++k) {
      const auto& g = circuit.gate(vt.gateIds[k]);
      const int i = g.qLo;
      const int j = g.qHi;
      emit(ar.lor({b.a(i, 0), b.a(j, 0)}), Family::Reachability);
      emit(ar.implies(ar.land({b.a(i, 0), b.a(j, 0)}),
                      ar.land({window(b.c(i, 0), b.c(j, 0), spec.colStack),
                               window(b.r(i, 0), b.r(j, 0), spec.rowStack)})),
           Family::Reachability);
    }
  }
  return m;
}

Model encodeAtLeastGates(Model m, int atLeast, int stageLo, int stageHi) {
  const int n = m.numGates();
  if (atLeast < 0 || atLeast > n) {
    throw EncodeError("cannot require " + std::to_string(atLeast) +
                      " gates from a model with " + std::to_string(n));
  }
  if (stageLo < 0 || stageHi > m.numStages() || stageLo >= stageHi) {
    throw EncodeError("stage range outside the model");
  }
  if (atLeast == 0) {
    return m;
  }
  auto& ar = m.arena_;
  const auto& vt = m.vars_;
  const std::string tag = "k" + std::to_string(m.cardinalityCount_++) + "_";
  auto emit = [&m](Expr e) {
    if (!m.arena_.isTrue(e)) {
      m.assertions_.push_back(Assertion{e, Family::Cardinality});
    }
  };

  // d_j: gate j counts. Only d_j => (executed in range) is needed.
  std::vector<Expr> lits;  // l_j = not d_j; at most n - atLeast of them true
  for (int k = 0; k < n; ++k) {
    const VarId d = ar.declare(tag + "d_" + std::to_string(k), Sort::Bool, true);
    const Expr t = ar.var(vt.t[k]);
    std::vector<Expr> member = {ar.le(ar.intConst(stageLo), t),
                                ar.lt(t, ar.intConst(stageHi))};
    if (!vt.executed.empty()) {
      member.push_back(ar.var(vt.executed[k]));
    }
    emit(ar.implies(ar.var(d), ar.land(member)));
    lits.push_back(ar.lnot(ar.var(d)));
  }

  const int bound = n - atLeast;
  if (bound == 0) {
    for (auto l : lits) {
      emit(ar.lnot(l));
    }
    return m;
  }

  // Sequential counter: s[i][j] holds when at least j+1 of l_0..l_i are true.
  std::vector<std::vector<Expr>> reg(n - 1, std::vector<Expr>(bound));
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j < bound; ++j) {
      reg[i][j] = ar.var(ar.declare(
          tag + "s_" + std::to_string(i) + "_" + std::to_string(j), Sort::Bool,
          true));
    }
  }
  auto clause = [&](std::initializer_list<Expr> xs) { emit(ar.lor(xs)); };
  clause({ar.lnot(lits[0]), reg[0][0]});
  for (int j = 1; j < bound; ++j) {
    clause({ar.lnot(reg[0][j])});
  }
  for (int i = 1; i + 1 < n; ++i) {
    clause({ar.lnot(lits[i]), reg[i][0]});
    clause({ar.lnot(reg[i - 1][0]), reg[i][0]});
    for (int j = 1; j < bound; ++j) {
      clause({ar.lnot(lits[i]), ar.lnot(reg[i - 1][j - 1]), reg[i][j]});
      clause({ar.lnot(reg[i - 1][j]), reg[i][j]});
    }
    clause({ar.lnot(lits[i]), ar.lnot(reg[i - 1][bound - 1])});
  }
  clause({ar.lnot(lits[n - 1]), ar.lnot(reg[n - 2][bound - 1])});
  return m;
}

Model pinInitialState(Model m, std::span<const QubitState> states) {
  const auto& vt = m.vars_;
  if (static_cast<int>(states.size()) != vt.numQubits) {
    throw EncodeError("pinned state must list every qubit exactly once");
  }
  auto& ar = m.arena_;
  for (int i = 0; i < vt.numQubits; ++i) {
    const auto& st = states[i];
    if (st.x < 0 || st.x >= m.boundX_ || st.y < 0 || st.y >= m.boundY_ ||
        st.col < 0 || st.col >= m.boundC_ || st.row < 0 || st.row >= m.boundR_) {
      throw EncodeError("pinned state of qubit " + std::to_string(i) +
                        " is out of bounds");
    }
    const auto at = vt.at(i, 0);
    const Expr pins[] = {
        ar.eq(ar.var(vt.x[at]), ar.intConst(st.x)),
        ar.eq(ar.var(vt.y[at]), ar.intConst(st.y)),
        st.aod ? ar.var(vt.a[at]) : ar.lnot(ar.var(vt.a[at])),
        ar.eq(ar.var(vt.c[at]), ar.intConst(st.col)),
        ar.eq(ar.var(vt.r[at]), ar.intConst(st.row)),
    };
    for (auto p : pins) {
      m.assertions_.push_back(Assertion{p, Family::Pin});
    }
  }
  return m;
}

Model pinInitialPlacement(Model m, std::span<const QubitState> states) {
  const auto& vt = m.vars_;
  if (static_cast<int>(states.size()) != vt.numQubits) {
    throw EncodeError("pinned state must list every qubit exactly once");
  }
  auto& ar = m.arena_;
  auto pin = [&](Expr e) { m.assertions_.push_back(Assertion{e, Family::Pin}); };
  for (int i = 0; i < vt.numQubits; ++i) {
    const auto& st = states[i];
    if (st.x < 0 || st.x >= m.boundX_ || st.y < 0 || st.y >= m.boundY_) {
      throw EncodeError("pinned state of qubit " + std::to_string(i) +
                        " is out of bounds");
    }
    const auto at = vt.at(i, 0);
    pin(ar.eq(ar.var(vt.x[at]), ar.intConst(st.x)));
    pin(ar.eq(ar.var(vt.y[at]), ar.intConst(st.y)));
    pin(st.aod ? ar.var(vt.a[at]) : ar.lnot(ar.var(vt.a[at])));
  }
  // AOD atoms keep which lines they share and the order of those lines.
  auto relate = [&](int u, int v, VarId lu, VarId lv) {
    if (u == v) {
      return ar.eq(ar.var(lu), ar.var(lv));
    }
    return u < v ? ar.lt(ar.var(lu), ar.var(lv)) : ar.lt(ar.var(lv), ar.var(lu));
  };
  for (int i = 0; i < vt.numQubits; ++i) {
    for (int j = i + 1; j < vt.numQubits; ++j) {
      if (!states[i].aod || !states[j].aod) {
        continue;
      }
      const auto ai = vt.at(i, 0);
      const auto aj = vt.at(j, 0);
      pin(relate(states[i].col, states[j].col, vt.c[ai], vt.c[aj]));
      pin(relate(states[i].row, states[j].row, vt.r[ai], vt.r[aj]));
    }
  }
  return m;
}

} // namespace dpqa
