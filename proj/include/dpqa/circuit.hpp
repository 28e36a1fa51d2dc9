#pragma once

#include "dpqa/json.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpqa {

class CircuitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A two-qubit gate. Operands are stored sorted, `qLo < qHi`.
struct Gate {
  int id = 0;
  int qLo = 0;
  int qHi = 0;

  [[nodiscard]] bool actsOn(int q) const { return q == qLo || q == qHi; }
  [[nodiscard]] bool sharesQubit(const Gate& o) const {
    return actsOn(o.qLo) || actsOn(o.qHi);
  }
  bool operator==(const Gate&) const = default;
};

using GatePair = std::pair<int, int>;
using QubitPair = std::pair<int, int>;

/**
 * Two-qubit gate list over `numQubits` qubits.
 *
 * When `commutable` is set, gates may execute in any order. Otherwise the
 * ordering constraints are `explicitDeps` if any were given, and the usual
 * circuit DAG (program order between gates sharing a qubit) if not.
 */
class Circuit {
public:
  Circuit() = default;
  Circuit(int numQubits, std::vector<std::pair<int, int>> operands,
          bool commutable, std::vector<GatePair> explicitDeps = {});

  [[nodiscard]] int numQubits() const { return numQubits_; }
  [[nodiscard]] int numGates() const { return static_cast<int>(gates_.size()); }
  [[nodiscard]] const std::vector<Gate>& gates() const { return gates_; }
  [[nodiscard]] const Gate& gate(int j) const { return gates_.at(j); }
  [[nodiscard]] bool commutable() const { return commutable_; }
  [[nodiscard]] const std::vector<GatePair>& explicitDeps() const {
    return explicitDeps_;
  }

  /// Ordered pairs (j, j') meaning g_j' must run strictly after g_j.
  [[nodiscard]] std::vector<GatePair> dependencies() const;

private:
  int numQubits_ = 0;
  std::vector<Gate> gates_;
  bool commutable_ = true;
  std::vector<GatePair> explicitDeps_;
};

/// rho: unordered qubit pair (lo, hi) -> ids of the gates acting on exactly
/// that pair. Pairs that never interact are absent.
using InteractionMap = std::map<QubitPair, std::vector<int>>;

Circuit loadCircuit(const Json& document);
Circuit loadCircuitFile(const std::string& path);
Json toJson(const Circuit& c);

/// Random simple `degree`-regular graph on `n` nodes (pairing model with
/// rejection), one commuting gate per edge. Deterministic for a fixed seed.
Circuit generateGraphCircuit(int n, int degree, std::uint64_t seed);

InteractionMap interactionMap(const Circuit& c);
/// Same, restricted to the gates whose ids are listed.
InteractionMap interactionMap(const Circuit& c, std::span<const int> gateIds);

/// All unordered gate pairs (j < j') that share a qubit.
std::vector<GatePair> collisionPairs(const Circuit& c);

/// Longest chain in the dependency DAG, counted in gates. Commutable circuits
/// have depth 1 whenever they contain a gate.
int dependencyDepth(const Circuit& c);

/// Maximum matching number of the multigraph whose edges are `gates`.
int maxMatchingBound(std::span<const Gate> gates);

int maxQubitDegree(const Circuit& c);

} // namespace dpqa
