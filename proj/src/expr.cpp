#include "dpqa/expr.hpp"

#include <stdexcept>

namespace dpqa::smt {

namespace {
constexpr std::uint32_t kTrue = 0;
constexpr std::uint32_t kFalse = 1;
} // namespace

ExprArena::ExprArena() {
  make(Op::BoolConst, 1, {});
  make(Op::BoolConst, 0, {});
}

VarId ExprArena::declare(std::string name, Sort sort, bool auxiliary) {
  const auto id = static_cast<VarId>(vars_.size());
  vars_.push_back(VarInfo{std::move(name), sort, auxiliary});
  varNodes_.push_back(make(Op::Var, id, {}));
  return id;
}

Expr ExprArena::make(Op op, std::int64_t payload, std::span<const Expr> kids) {
  const auto first = static_cast<std::uint32_t>(pool_.size());
  pool_.insert(pool_.end(), kids.begin(), kids.end());
  nodes_.push_back(
      Node{op, payload, first, static_cast<std::uint32_t>(kids.size())});
  return Expr{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::span<const Expr> ExprArena::children(Expr e) const {
  const auto& n = nodes_[e.id];
  return {pool_.data() + n.first, n.count};
}

bool ExprArena::isTrue(Expr e) const { return e.id == kTrue; }
bool ExprArena::isFalse(Expr e) const { return e.id == kFalse; }

Expr ExprArena::intConst(std::int64_t v) { return make(Op::IntConst, v, {}); }

Expr ExprArena::boolConst(bool v) { return Expr{v ? kTrue : kFalse}; }

Expr ExprArena::var(VarId v) {
  if (v >= vars_.size()) {
    throw std::out_of_range("undeclared variable");
  }
  return varNodes_[v];
}

Expr ExprArena::add(Expr a, Expr b) {
  const Expr kids[] = {a, b};
  return make(Op::Add, 0, kids);
}

Expr ExprArena::sub(Expr a, Expr b) {
  const Expr kids[] = {a, b};
  return make(Op::Sub, 0, kids);
}

Expr ExprArena::eq(Expr a, Expr b) {
  const Expr kids[] = {a, b};
  return make(Op::Eq, 0, kids);
}

Expr ExprArena::ne(Expr a, Expr b) {
  const Expr kids[] = {a, b};
  return make(Op::Distinct, 0, kids);
}

Expr ExprArena::lt(Expr a, Expr b) {
  const Expr kids[] = {a, b};
  return make(Op::Lt, 0, kids);
}

Expr ExprArena::le(Expr a, Expr b) {
  const Expr kids[] = {a, b};
  return make(Op::Le, 0, kids);
}

Expr ExprArena::lnot(Expr a) {
  if (isTrue(a)) {
    return boolConst(false);
  }
  if (isFalse(a)) {
    return boolConst(true);
  }
  const Expr kids[] = {a};
  return make(Op::Not, 0, kids);
}

Expr ExprArena::land(std::span<const Expr> xs) {
  std::vector<Expr> kept;
  kept.reserve(xs.size());
  for (auto x : xs) {
    if (isFalse(x)) {
      return boolConst(false);
    }
    if (!isTrue(x)) {
      kept.push_back(x);
    }
  }
  if (kept.empty()) {
    return boolConst(true);
  }
  if (kept.size() == 1) {
    return kept.front();
  }
  return make(Op::And, 0, kept);
}

Expr ExprArena::lor(std::span<const Expr> xs) {
  std::vector<Expr> kept;
  kept.reserve(xs.size());
  for (auto x : xs) {
    if (isTrue(x)) {
      return boolConst(true);
    }
    if (!isFalse(x)) {
      kept.push_back(x);
    }
  }
  if (kept.empty()) {
    return boolConst(false);
  }
  if (kept.size() == 1) {
    return kept.front();
  }
  return make(Op::Or, 0, kept);
}

Expr ExprArena::implies(Expr a, Expr b) {
  if (isTrue(a)) {
    return b;
  }
  if (isFalse(a) || isTrue(b)) {
    return boolConst(true);
  }
  const Expr kids[] = {a, b};
  return make(Op::Implies, 0, kids);
}

std::int64_t ExprArena::evaluate(Expr e,
                                 std::span<const std::int64_t> values) const {
  const auto& n = nodes_[e.id];
  const auto kids = children(e);
  auto ev = [&](std::size_t k) { return evaluate(kids[k], values); };
  switch (n.op) {
  case Op::IntConst:
  case Op::BoolConst:
    return n.payload;
  case Op::Var:
    return values[static_cast<std::size_t>(n.payload)];
  case Op::Add:
    return ev(0) + ev(1);
  case Op::Sub:
    return ev(0) - ev(1);
  case Op::Eq:
    return ev(0) == ev(1) ? 1 : 0;
  case Op::Distinct:
    return ev(0) != ev(1) ? 1 : 0;
  case Op::Lt:
    return ev(0) < ev(1) ? 1 : 0;
  case Op::Le:
    return ev(0) <= ev(1) ? 1 : 0;
  case Op::Not:
    return ev(0) != 0 ? 0 : 1;
  case Op::And:
    for (std::size_t k = 0; k < kids.size(); ++k) {
      if (ev(k) == 0) {
        return 0;
      }
    }
    return 1;
  case Op::Or:
    for (std::size_t k = 0; k < kids.size(); ++k) {
      if (ev(k) != 0) {
        return 1;
      }
    }
    return 0;
  case Op::Implies:
    return (ev(0) == 0 || ev(1) != 0) ? 1 : 0;
  }
  throw std::logic_error("unknown expression node");
}

void ExprArena::print(Expr e, std::string& out) const {
  const auto& n = nodes_[e.id];
  const auto kids = children(e);
  const char* head = nullptr;
  switch (n.op) {
  case Op::IntConst:
    if (n.payload < 0) {
      out += "(- ";
      out += std::to_string(-n.payload);
      out += ')';
    } else {
      out += std::to_string(n.payload);
    }
    return;
  case Op::BoolConst:
    out += n.payload != 0 ? "true" : "false";
    return;
  case Op::Var:
    out += vars_[static_cast<std::size_t>(n.payload)].name;
    return;
  case Op::Add: head = "+"; break;
  case Op::Sub: head = "-"; break;
  case Op::Eq: head = "="; break;
  case Op::Distinct: head = "distinct"; break;
  case Op::Lt: head = "<"; break;
  case Op::Le: head = "<="; break;
  case Op::Not: head = "not"; break;
  case Op::And: head = "and"; break;
  case Op::Or: head = "or"; break;
  case Op::Implies: head = "=>"; break;
  }
  out += '(';
  out += head;
  for (auto k : kids) {
    out += ' ';
    print(k, out);
  }
  out += ')';
}

std::string ExprArena::toString(Expr e) const {
  std::string s;
  print(e, s);
  return s;
}

} // namespace dpqa::smt
