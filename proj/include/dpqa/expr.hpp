#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace dpqa::smt {

/// Index of a node inside an ExprArena.
struct Expr {
  std::uint32_t id = 0;
};

using VarId = std::uint32_t;

enum class Sort : std::uint8_t { Int, Bool };

enum class Op : std::uint8_t {
  IntConst,
  BoolConst,
  Var,
  Add,
  Sub,
  Eq,
  Distinct,
  Lt,
  Le,
  Not,
  And,
  Or,
  Implies,
};

struct VarInfo {
  std::string name;
  Sort sort = Sort::Int;
  bool auxiliary = false;
};

/**
 * Append-only store of expression nodes over linear integer arithmetic with
 * Boolean structure. Children live in one shared pool; a node records the
 * range it owns. Builders fold trivial constants so that emitted formulas
 * stay readable.
 */
class ExprArena {
public:
  ExprArena();

  VarId declare(std::string name, Sort sort, bool auxiliary = false);
  [[nodiscard]] const std::vector<VarInfo>& vars() const { return vars_; }
  [[nodiscard]] const VarInfo& var(VarId v) const { return vars_.at(v); }

  Expr intConst(std::int64_t v);
  Expr boolConst(bool v);
  Expr var(VarId v);

  Expr add(Expr a, Expr b);
  Expr sub(Expr a, Expr b);
  Expr eq(Expr a, Expr b);
  Expr ne(Expr a, Expr b);
  Expr lt(Expr a, Expr b);
  Expr le(Expr a, Expr b);
  Expr gt(Expr a, Expr b) { return lt(b, a); }
  Expr ge(Expr a, Expr b) { return le(b, a); }
  Expr lnot(Expr a);
  Expr land(std::span<const Expr> xs);
  Expr land(std::initializer_list<Expr> xs) {
    return land(std::span<const Expr>(xs.begin(), xs.size()));
  }
  Expr lor(std::span<const Expr> xs);
  Expr lor(std::initializer_list<Expr> xs) {
    return lor(std::span<const Expr>(xs.begin(), xs.size()));
  }
  Expr implies(Expr a, Expr b);

  [[nodiscard]] Op op(Expr e) const { return nodes_[e.id].op; }
  [[nodiscard]] std::int64_t payload(Expr e) const { return nodes_[e.id].payload; }
  [[nodiscard]] std::span<const Expr> children(Expr e) const;
  [[nodiscard]] bool isTrue(Expr e) const;
  [[nodiscard]] bool isFalse(Expr e) const;
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  /// Value of `e` under a total assignment (Booleans as 0/1).
  [[nodiscard]] std::int64_t evaluate(Expr e,
                                      std::span<const std::int64_t> values) const;

  void print(Expr e, std::string& out) const;
  [[nodiscard]] std::string toString(Expr e) const;

private:
  struct Node {
    Op op;
    std::int64_t payload;  // constant value or VarId
    std::uint32_t first;   // into pool_
    std::uint32_t count;
  };

  Expr make(Op op, std::int64_t payload, std::span<const Expr> kids);

  std::vector<VarInfo> vars_;
  std::vector<Expr> varNodes_;
  std::vector<Node> nodes_;
  std::vector<Expr> pool_;
};

} // namespace dpqa::smt
