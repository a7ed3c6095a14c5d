#include "sbr/logic/tnorm.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sbr::logic {

std::string_view to_string(TNormKind kind) {
  switch (kind) {
    case TNormKind::minimum: return "minimum";
    case TNormKind::product: return "product";
    case TNormKind::lukasiewicz: return "lukasiewicz";
  }
  return "unknown";
}

TNormKind parse_tnorm(std::string_view name) {
  if (name == "minimum" || name == "min") return TNormKind::minimum;
  if (name == "product" || name == "prod") return TNormKind::product;
  if (name == "lukasiewicz" || name == "luk") return TNormKind::lukasiewicz;
  throw std::invalid_argument("unknown t-norm '" + std::string(name) + "'");
}

double negation(double x) { return 1.0 - x; }

double t_norm(TNormKind kind, double a, double b) {
  switch (kind) {
    case TNormKind::minimum: return std::min(a, b);
    case TNormKind::product: return a * b;
    case TNormKind::lukasiewicz: return std::max(0.0, a + b - 1.0);
  }
  return 0.0;
}

// N(T(N(a), N(b)))
double t_conorm(TNormKind kind, double a, double b) {
  switch (kind) {
    case TNormKind::minimum: return std::max(a, b);
    case TNormKind::product: return a + b - a * b;
    case TNormKind::lukasiewicz: return std::min(1.0, a + b);
  }
  return 0.0;
}

double residuum(TNormKind kind, double a, double b) {
  if (a <= b) return 1.0;
  switch (kind) {
    case TNormKind::minimum: return b;
    case TNormKind::product: return a < kResiduumGuard ? 1.0 : b / a;
    case TNormKind::lukasiewicz: return 1.0 - a + b;
  }
  return 0.0;
}

double material_implication(TNormKind kind, double a, double b) {
  return negation(t_norm(kind, a, negation(b)));
}

namespace {

double implies(TNormKind kind, double a, double b, ImplicationMode mode) {
  return mode == ImplicationMode::residuum ? residuum(kind, a, b) : material_implication(kind, a, b);
}

std::array<double, 2> implies_partials(TNormKind kind, double a, double b, ImplicationMode mode) {
  return mode == ImplicationMode::residuum ? residuum_partials(kind, a, b)
                                           : material_implication_partials(kind, a, b);
}

}  // namespace

double equivalence(TNormKind kind, double a, double b, ImplicationMode mode) {
  return t_norm(kind, implies(kind, a, b, mode), implies(kind, b, a, mode));
}

std::array<double, 2> t_norm_partials(TNormKind kind, double a, double b) {
  switch (kind) {
    case TNormKind::minimum: return a <= b ? std::array{1.0, 0.0} : std::array{0.0, 1.0};
    case TNormKind::product: return {b, a};
    case TNormKind::lukasiewicz: return a + b - 1.0 > 0.0 ? std::array{1.0, 1.0} : std::array{0.0, 0.0};
  }
  return {0.0, 0.0};
}

std::array<double, 2> t_conorm_partials(TNormKind kind, double a, double b) {
  // d/da N(T(N(a), N(b))) = dT/du evaluated at (1-a, 1-b)
  return t_norm_partials(kind, 1.0 - a, 1.0 - b);
}

std::array<double, 2> residuum_partials(TNormKind kind, double a, double b) {
  if (a <= b) return {0.0, 0.0};
  switch (kind) {
    case TNormKind::minimum: return {0.0, 1.0};
    case TNormKind::product:
      if (a < kResiduumGuard) return {0.0, 0.0};
      return {-b / (a * a), 1.0 / a};
    case TNormKind::lukasiewicz: return {-1.0, 1.0};
  }
  return {0.0, 0.0};
}

std::array<double, 2> material_implication_partials(TNormKind kind, double a, double b) {
  const auto [dt_da, dt_dnb] = t_norm_partials(kind, a, 1.0 - b);
  return {-dt_da, dt_dnb};
}

std::array<double, 2> equivalence_partials(TNormKind kind, double a, double b, ImplicationMode mode) {
  const double r1 = implies(kind, a, b, mode);
  const double r2 = implies(kind, b, a, mode);
  const auto [dt_dr1, dt_dr2] = t_norm_partials(kind, r1, r2);
  const auto [dr1_da, dr1_db] = implies_partials(kind, a, b, mode);
  const auto [dr2_db, dr2_da] = implies_partials(kind, b, a, mode);
  return {dt_dr1 * dr1_da + dt_dr2 * dr2_da, dt_dr1 * dr1_db + dt_dr2 * dr2_db};
}

double eval_connective(TNormKind kind, NodeKind node, std::span<const double> operands,
                       ImplicationMode implication) {
  for (double x : operands) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::domain_error("connective operand " + std::to_string(x) + " outside [0,1]");
    }
  }
  const std::size_t expected = node == NodeKind::negation ? 1 : 2;
  if (node == NodeKind::atom) {
    throw std::invalid_argument("eval_connective: atoms are not connectives");
  }
  if (operands.size() != expected) {
    throw std::domain_error("eval_connective: expected " + std::to_string(expected) + " operands");
  }
  switch (node) {
    case NodeKind::negation: return negation(operands[0]);
    case NodeKind::conjunction: return t_norm(kind, operands[0], operands[1]);
    case NodeKind::disjunction: return t_conorm(kind, operands[0], operands[1]);
    case NodeKind::implication: return implies(kind, operands[0], operands[1], implication);
    case NodeKind::equivalence: return equivalence(kind, operands[0], operands[1], implication);
    case NodeKind::atom: break;
  }
  return 0.0;
}

}  // namespace sbr::logic
