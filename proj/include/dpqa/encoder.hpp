#pragma once

#include "dpqa/architecture.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/expr.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dpqa {

class EncodeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Architecture state of one qubit at one stage.
struct QubitState {
  int x = 0;
  int y = 0;
  bool aod = false;
  int col = 0;
  int row = 0;
  bool operator==(const QubitState&) const = default;
};

/// Constraint families, in emission order.
enum class Family {
  Bounds,
  StationarySlm,
  AodWholeLines,
  SiteOrder,
  NoCrossing,
  MaxStacking,
  FixedArray,
  TransferSite,
  TransferLines,
  Collision,
  Dependency,
  Connectivity,
  OneAtomOneTrap,
  Exactness,
  ExactnessEmpty,
  Reachability,
  Cardinality,
  Pin,
};

const char* familyName(Family f);

struct EncodeOptions {
  bool allowTransfer = false;
  /// Stage 0 replays a state fixed by an earlier solution: no gate runs at
  /// stage 0 and the interaction rules are not re-imposed there.
  bool pinnedStage0 = false;
  /// Gates may stay unexecuted (one peeling step). Adds an auxiliary
  /// "executed" flag per gate.
  bool partial = false;
  /// Gates to schedule; all gates of the circuit when empty.
  std::optional<std::vector<int>> gateSubset;
  /// Without transfers the SLM/AOD split and AOD line indices never change.
  /// Require at stage 0 that every gate of the whole circuit stays reachable:
  /// no SLM-SLM gate, and AOD-AOD gates within the stacking window.
  bool reachability = false;
};

/// Handles of the core variables: x, y, a, c, r per qubit and stage, t per
/// scheduled gate.
struct VarTable {
  int numQubits = 0;
  int numStages = 0;
  std::vector<int> gateIds;  ///< model gate index -> circuit gate id
  std::vector<smt::VarId> x, y, a, c, r;  ///< index qubit * numStages + stage
  std::vector<smt::VarId> t;
  std::vector<smt::VarId> executed;  ///< partial models only (auxiliary)

  [[nodiscard]] std::size_t at(int qubit, int stage) const {
    return static_cast<std::size_t>(qubit) * numStages + stage;
  }
};

struct Assertion {
  smt::Expr expr;
  Family family;
};

/**
 * SMT model of layout synthesis over a fixed number of stages. Values are
 * immutable; the encoding helpers return extended copies.
 */
class Model {
public:
  [[nodiscard]] const smt::ExprArena& arena() const { return arena_; }
  [[nodiscard]] const VarTable& vars() const { return vars_; }
  [[nodiscard]] const std::vector<Assertion>& assertions() const {
    return assertions_;
  }
  [[nodiscard]] const EncodeOptions& options() const { return options_; }
  [[nodiscard]] int numStages() const { return vars_.numStages; }
  [[nodiscard]] int numGates() const {
    return static_cast<int>(vars_.gateIds.size());
  }

  /// 5 N S + G: site, array and line indices per qubit-stage, plus gate times.
  [[nodiscard]] std::size_t coreVariableCount() const;
  [[nodiscard]] std::size_t auxiliaryVariableCount() const;
  [[nodiscard]] std::map<Family, std::size_t> familyCounts() const;

  /// SMT-LIB2 script (QF_LIA) without check-sat; declarations then
  /// assertions in construction order.
  [[nodiscard]] std::string toSmtLib2() const;

  /// Indices of assertions that are false under `values` (one value per
  /// declared variable, Booleans as 0/1).
  [[nodiscard]] std::vector<std::size_t>
  violatedAssertions(std::span<const std::int64_t> values) const;

private:
  friend Model buildModel(const Circuit&, const ArchSpec&, int,
                          const EncodeOptions&);
  friend Model encodeAtLeastGates(Model, int, int, int);
  friend Model pinInitialState(Model, std::span<const QubitState>);
  friend Model pinInitialPlacement(Model, std::span<const QubitState>);

  smt::ExprArena arena_;
  VarTable vars_;
  std::vector<Assertion> assertions_;
  EncodeOptions options_;
  int boundX_ = 0, boundY_ = 0, boundC_ = 0, boundR_ = 0;
  int cardinalityCount_ = 0;
};

/// All circuit-independent and circuit-dependent constraints for `stages`.
Model buildModel(const Circuit& circuit, const ArchSpec& spec, int stages,
                 const EncodeOptions& options = {});

/// Require at least `atLeast` gates to execute in [stageLo, stageHi),
/// encoded with a sequential counter over auxiliary Booleans.
Model encodeAtLeastGates(Model m, int atLeast, int stageLo, int stageHi);

/// Fix every stage-0 variable to the given per-qubit states.
Model pinInitialState(Model m, std::span<const QubitState> states);

/// Fix stage-0 sites and array flags; AOD line indices stay free up to the
/// grouping and order of the given lines. SLM line indices are left free.
Model pinInitialPlacement(Model m, std::span<const QubitState> states);

} // namespace dpqa
