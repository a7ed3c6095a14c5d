#include "sbr/logic/formula.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace sbr::logic {

Expr Expr::atom(std::string predicate, std::vector<std::string> args) {
  Expr e;
  e.kind = NodeKind::atom;
  e.predicate = std::move(predicate);
  e.args = std::move(args);
  return e;
}

Expr Expr::negation(Expr operand) {
  Expr e;
  e.kind = NodeKind::negation;
  e.children.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(NodeKind kind, Expr lhs, Expr rhs) {
  if (kind == NodeKind::atom || kind == NodeKind::negation) {
    throw std::invalid_argument("Expr::binary: not a binary connective");
  }
  Expr e;
  e.kind = kind;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

namespace {

// Binding strength used to decide where parentheses are needed.
int precedence(NodeKind kind) {
  switch (kind) {
    case NodeKind::equivalence: return 1;
    case NodeKind::implication: return 2;
    case NodeKind::disjunction: return 3;
    case NodeKind::conjunction: return 4;
    case NodeKind::negation: return 5;
    case NodeKind::atom: return 6;
  }
  return 0;
}

std::string wrap(const Expr& child, bool parens) {
  std::string s = to_string(child);
  return parens ? "(" + s + ")" : s;
}

void collect(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == NodeKind::atom) {
    if (std::find(out.begin(), out.end(), e.predicate) == out.end()) {
      out.push_back(e.predicate);
    }
    return;
  }
  for (const auto& c : e.children) collect(c, out);
}

Expr fold(NodeKind kind, std::vector<Expr> operands) {
  if (operands.empty()) {
    throw std::invalid_argument("cannot fold an empty operand list");
  }
  Expr acc = std::move(operands.front());
  for (std::size_t i = 1; i < operands.size(); ++i) {
    acc = Expr::binary(kind, std::move(acc), std::move(operands[i]));
  }
  return acc;
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case NodeKind::atom: {
      std::string s = e.predicate + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) s += ",";
        s += e.args[i];
      }
      return s + ")";
    }
    case NodeKind::negation:
      return "not " + wrap(e.children[0], precedence(e.children[0].kind) < precedence(NodeKind::negation));
    default: break;
  }
  const int p = precedence(e.kind);
  const Expr& lhs = e.children[0];
  const Expr& rhs = e.children[1];
  const char* op = "";
  bool lhs_parens = false;
  bool rhs_parens = false;
  switch (e.kind) {
    case NodeKind::conjunction:
    case NodeKind::disjunction:
    case NodeKind::equivalence:
      // left-associative chains
      op = e.kind == NodeKind::conjunction ? " and " : e.kind == NodeKind::disjunction ? " or " : " <=> ";
      lhs_parens = precedence(lhs.kind) < p;
      rhs_parens = precedence(rhs.kind) <= p;
      break;
    case NodeKind::implication:
      op = " => ";
      lhs_parens = precedence(lhs.kind) <= p;
      rhs_parens = precedence(rhs.kind) < p;
      break;
    default: break;
  }
  return wrap(lhs, lhs_parens) + op + wrap(rhs, rhs_parens);
}

std::string to_string(const Formula& f) {
  std::string s;
  for (const auto& q : f.quantifiers) {
    switch (q.kind) {
      case QuantifierKind::forall: s += "forall "; break;
      case QuantifierKind::exists: s += "exists "; break;
      case QuantifierKind::exists_n: s += "exists[" + std::to_string(q.count) + "] "; break;
    }
    s += q.variable + ":" + q.domain + ". ";
  }
  return s + to_string(f.body);
}

std::vector<std::string> referenced_predicates(const Formula& formula) {
  std::vector<std::string> out;
  collect(formula.body, out);
  return out;
}

Expr disjunction_of(std::vector<Expr> operands) {
  return fold(NodeKind::disjunction, std::move(operands));
}

Expr conjunction_of(std::vector<Expr> operands) {
  return fold(NodeKind::conjunction, std::move(operands));
}

}  // namespace sbr::logic
