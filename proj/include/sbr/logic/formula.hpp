#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sbr::logic {

enum class QuantifierKind { forall, exists, exists_n };

struct Quantifier {
  QuantifierKind kind = QuantifierKind::forall;
  std::size_t count = 1;  // only meaningful for exists_n
  std::string variable;
  std::string domain;

  bool operator==(const Quantifier&) const = default;
};

enum class NodeKind { atom, negation, conjunction, disjunction, implication, equivalence };

// Propositional body of a prenex formula. Connective nodes are binary except
// negation; chains such as `a or b or c` are stored left-nested.
struct Expr {
  NodeKind kind = NodeKind::atom;
  std::string predicate;           // atom only
  std::vector<std::string> args;   // atom only, arity 1 or 2
  std::vector<Expr> children;

  static Expr atom(std::string predicate, std::vector<std::string> args);
  static Expr negation(Expr operand);
  static Expr binary(NodeKind kind, Expr lhs, Expr rhs);

  bool operator==(const Expr&) const = default;
};

struct Formula {
  std::vector<Quantifier> quantifiers;
  Expr body;

  bool operator==(const Formula&) const = default;
};

// Renders the formula in the rule-file grammar; parse_rule(to_string(f)) == f.
std::string to_string(const Expr& expr);
std::string to_string(const Formula& formula);

// Predicate names referenced by the body, in first-occurrence order.
std::vector<std::string> referenced_predicates(const Formula& formula);

// Left-nested disjunction / conjunction over a nonempty operand list.
Expr disjunction_of(std::vector<Expr> operands);
Expr conjunction_of(std::vector<Expr> operands);

}  // namespace sbr::logic
