#include "dpqa/circuit.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace dpqa {

Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void writeJsonFile(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

Circuit::Circuit(int numQubits, std::vector<std::pair<int, int>> operands,
                 bool commutable, std::vector<GatePair> explicitDeps)
    : numQubits_(numQubits), commutable_(commutable),
      explicitDeps_(std::move(explicitDeps)) {
  if (numQubits_ < 0) {
    throw CircuitError("negative qubit count");
  }
  gates_.reserve(operands.size());
  for (const auto& [a, b] : operands) {
    const int j = static_cast<int>(gates_.size());
    if (a == b) {
      throw CircuitError("self-loop gate " + std::to_string(j) + " on qubit " +
                         std::to_string(a));
    }
    if (a < 0 || b < 0 || a >= numQubits_ || b >= numQubits_) {
      throw CircuitError("gate " + std::to_string(j) +
                         " references a qubit out of range");
    }
    gates_.push_back(Gate{j, std::min(a, b), std::max(a, b)});
  }
  if (commutable_ && !explicitDeps_.empty()) {
    throw CircuitError("commutable circuits cannot carry dependencies");
  }
  const int g = numGates();
  for (const auto& [j, k] : explicitDeps_) {
    if (j < 0 || k < 0 || j >= g || k >= g || j == k) {
      throw CircuitError("dependency (" + std::to_string(j) + ", " +
                         std::to_string(k) + ") is invalid");
    }
  }
}

std::vector<GatePair> Circuit::dependencies() const {
  if (commutable_) {
    return {};
  }
  if (!explicitDeps_.empty()) {
    return explicitDeps_;
  }
  std::vector<GatePair> deps;
  std::vector<int> last(static_cast<std::size_t>(numQubits_), -1);
  for (const auto& g : gates_) {
    std::set<int> preds;
    for (int q : {g.qLo, g.qHi}) {
      if (last[q] >= 0) {
        preds.insert(last[q]);
      }
      last[q] = g.id;
    }
    for (int p : preds) {
      deps.emplace_back(p, g.id);
    }
  }
  return deps;
}

namespace {

std::pair<int, int> parseOperands(const Json& entry, std::size_t pos) {
  const Json* pair = &entry;
  if (entry.is_object()) {
    if (!entry.contains("qubits")) {
      throw CircuitError("gate " + std::to_string(pos) + " has no 'qubits'");
    }
    pair = &entry.at("qubits");
  }
  if (!pair->is_array() || pair->size() != 2 || !(*pair)[0].is_number_integer() ||
      !(*pair)[1].is_number_integer()) {
    throw CircuitError("gate " + std::to_string(pos) +
                       " must be a pair of qubit indices");
  }
  return {(*pair)[0].get<int>(), (*pair)[1].get<int>()};
}

} // namespace

Circuit loadCircuit(const Json& doc) {
  if (!doc.is_object()) {
    throw CircuitError("circuit document must be an object");
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw CircuitError("circuit document needs an integer 'n'");
  }
  if (!doc.contains("gates") || !doc["gates"].is_array()) {
    throw CircuitError("circuit document needs a 'gates' array");
  }
  bool commutable = true;
  if (doc.contains("commutable")) {
    if (!doc["commutable"].is_boolean()) {
      throw CircuitError("'commutable' must be a boolean");
    }
    commutable = doc["commutable"].get<bool>();
  }

  // Gates may be bare pairs or {"id": j, "qubits": [i, i']}; ids are only used
  // to resolve dependencies and are renumbered densely in input order.
  std::vector<std::pair<int, int>> operands;
  std::unordered_map<int, int> idToPos;
  const auto& gates = doc["gates"];
  for (std::size_t pos = 0; pos < gates.size(); ++pos) {
    const auto& entry = gates[pos];
    int id = static_cast<int>(pos);
    if (entry.is_object() && entry.contains("id")) {
      if (!entry["id"].is_number_integer()) {
        throw CircuitError("gate id must be an integer");
      }
      id = entry["id"].get<int>();
    }
    if (!idToPos.emplace(id, static_cast<int>(pos)).second) {
      throw CircuitError("duplicate gate id " + std::to_string(id));
    }
    operands.push_back(parseOperands(entry, pos));
  }

  std::vector<GatePair> deps;
  if (doc.contains("deps")) {
    if (!doc["deps"].is_array()) {
      throw CircuitError("'deps' must be an array");
    }
    for (const auto& d : doc["deps"]) {
      if (!d.is_array() || d.size() != 2 || !d[0].is_number_integer() ||
          !d[1].is_number_integer()) {
        throw CircuitError("each dependency must be a pair of gate ids");
      }
      const auto a = idToPos.find(d[0].get<int>());
      const auto b = idToPos.find(d[1].get<int>());
      if (a == idToPos.end() || b == idToPos.end()) {
        throw CircuitError("dependency references an unknown gate id");
      }
      deps.emplace_back(a->second, b->second);
    }
  }
  return Circuit(doc["n"].get<int>(), std::move(operands), commutable,
                 std::move(deps));
}

Circuit loadCircuitFile(const std::string& path) {
  return loadCircuit(readJsonFile(path));
}

Json toJson(const Circuit& c) {
  Json doc;
  doc["n"] = c.numQubits();
  doc["commutable"] = c.commutable();
  Json gates = Json::array();
  for (const auto& g : c.gates()) {
    gates.push_back({g.qLo, g.qHi});
  }
  doc["gates"] = std::move(gates);
  if (!c.explicitDeps().empty()) {
    Json deps = Json::array();
    for (const auto& [a, b] : c.explicitDeps()) {
      deps.push_back({a, b});
    }
    doc["deps"] = std::move(deps);
  }
  return doc;
}

Circuit generateGraphCircuit(int n, int degree, std::uint64_t seed) {
  if (n <= 0 || degree < 0) {
    throw CircuitError("graph size and degree must be positive");
  }
  if (degree >= n) {
    throw CircuitError("infeasible: a simple " + std::to_string(degree) +
                       "-regular graph needs more than " + std::to_string(n) +
                       " nodes");
  }
  if ((static_cast<long>(n) * degree) % 2 != 0) {
    throw CircuitError("infeasible: n * degree must be even");
  }
  constexpr int kRetryCap = 10000;

  std::mt19937_64 rng(seed);
  // Fisher-Yates with rejection-sampled indices; std::shuffle and the std
  // distributions are not specified bit-for-bit across standard libraries.
  auto uniformBelow = [&rng](std::uint64_t bound) {
    const std::uint64_t limit = rng.max() - (rng.max() % bound);
    std::uint64_t v = 0;
    do {
      v = rng();
    } while (v >= limit);
    return v % bound;
  };

  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * degree);
  for (int v = 0; v < n; ++v) {
    for (int k = 0; k < degree; ++k) {
      stubs.push_back(v);
    }
  }

  for (int attempt = 0; attempt < kRetryCap; ++attempt) {
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::swap(stubs[i - 1], stubs[uniformBelow(i)]);
    }
    std::set<std::pair<int, int>> edges;
    bool simple = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      const int a = std::min(stubs[i], stubs[i + 1]);
      const int b = std::max(stubs[i], stubs[i + 1]);
      if (a == b || !edges.emplace(a, b).second) {
        simple = false;
        break;
      }
    }
    if (simple) {
      return Circuit(n, {edges.begin(), edges.end()}, true);
    }
  }
  throw CircuitError("rejection sampling exceeded " +
                     std::to_string(kRetryCap) + " attempts");
}

InteractionMap interactionMap(const Circuit& c) {
  InteractionMap rho;
  for (const auto& g : c.gates()) {
    rho[{g.qLo, g.qHi}].push_back(g.id);
  }
  return rho;
}

InteractionMap interactionMap(const Circuit& c, std::span<const int> gateIds) {
  InteractionMap rho;
  for (int j : gateIds) {
    const auto& g = c.gate(j);
    rho[{g.qLo, g.qHi}].push_back(g.id);
  }
  return rho;
}

std::vector<GatePair> collisionPairs(const Circuit& c) {
  std::vector<GatePair> out;
  const auto& gs = c.gates();
  for (std::size_t j = 0; j < gs.size(); ++j) {
    for (std::size_t k = j + 1; k < gs.size(); ++k) {
      if (gs[j].sharesQubit(gs[k])) {
        out.emplace_back(gs[j].id, gs[k].id);
      }
    }
  }
  return out;
}

int dependencyDepth(const Circuit& c) {
  const int g = c.numGates();
  if (g == 0) {
    return 0;
  }
  if (c.commutable()) {
    return 1;
  }
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(g));
  std::vector<int> indeg(static_cast<std::size_t>(g), 0);
  for (const auto& [a, b] : c.dependencies()) {
    succ[a].push_back(b);
    ++indeg[b];
  }
  std::vector<int> depth(static_cast<std::size_t>(g), 1);
  std::vector<int> ready;
  for (int j = 0; j < g; ++j) {
    if (indeg[j] == 0) {
      ready.push_back(j);
    }
  }
  int visited = 0;
  int best = 0;
  while (!ready.empty()) {
    const int j = ready.back();
    ready.pop_back();
    ++visited;
    best = std::max(best, depth[j]);
    for (int k : succ[j]) {
      depth[k] = std::max(depth[k], depth[j] + 1);
      if (--indeg[k] == 0) {
        ready.push_back(k);
      }
    }
  }
  if (visited != g) {
    throw CircuitError("cyclic dependencies");
  }
  return best;
}

int maxMatchingBound(std::span<const Gate> gates) {
  if (gates.empty()) {
    return 0;
  }
  // Compact the touched qubits so the matching graph stays small.
  std::unordered_map<int, int> index;
  for (const auto& g : gates) {
    index.emplace(g.qLo, static_cast<int>(index.size()));
    index.emplace(g.qHi, static_cast<int>(index.size()));
  }
  using Graph =
      boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  Graph graph(index.size());
  for (const auto& g : gates) {
    boost::add_edge(index[g.qLo], index[g.qHi], graph);
  }
  std::vector<boost::graph_traits<Graph>::vertex_descriptor> mate(index.size());
  boost::edmonds_maximum_cardinality_matching(graph, &mate[0]);
  return static_cast<int>(boost::matching_size(graph, &mate[0]));
}

int maxQubitDegree(const Circuit& c) {
  std::vector<int> deg(static_cast<std::size_t>(c.numQubits()), 0);
  int best = 0;
  for (const auto& g : c.gates()) {
    best = std::max({best, ++deg[g.qLo], ++deg[g.qHi]});
  }
  return best;
}

} // namespace dpqa
