#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "sbr/logic/formula.hpp"

namespace sbr::logic {

enum class TNormKind { minimum, product, lukasiewicz };

// How `=>` is mapped to [0,1]. The residuum is the default; the material form
// N(T(x1, N(x2))) is kept for comparison runs.
enum class ImplicationMode { residuum, material };

// Below this antecedent value the product residuum is treated as satisfied.
inline constexpr double kResiduumGuard = 1e-12;

std::string_view to_string(TNormKind kind);
TNormKind parse_tnorm(std::string_view name);

double negation(double x);
double t_norm(TNormKind kind, double a, double b);
double t_conorm(TNormKind kind, double a, double b);
double residuum(TNormKind kind, double a, double b);
double material_implication(TNormKind kind, double a, double b);
// T(I(a,b), I(b,a)) where I is the implication selected by `mode`.
double equivalence(TNormKind kind, double a, double b,
                   ImplicationMode mode = ImplicationMode::residuum);

// Partial derivatives (d/da, d/db). On non-smooth loci a fixed one-sided
// choice is returned: min ties route to the first operand, the residuum
// boundary a == b reports the satisfied branch (zero), and the Lukasiewicz
// boundary a + b == 1 reports the clamped branch (zero).
std::array<double, 2> t_norm_partials(TNormKind kind, double a, double b);
std::array<double, 2> t_conorm_partials(TNormKind kind, double a, double b);
std::array<double, 2> residuum_partials(TNormKind kind, double a, double b);
std::array<double, 2> material_implication_partials(TNormKind kind, double a, double b);
std::array<double, 2> equivalence_partials(TNormKind kind, double a, double b,
                                           ImplicationMode mode = ImplicationMode::residuum);

// Evaluates one connective on operands in [0,1]; negation takes one operand,
// all other kinds take two. Throws std::domain_error for operands outside
// [0,1] or a wrong operand count, std::invalid_argument for NodeKind::atom.
double eval_connective(TNormKind kind, NodeKind node, std::span<const double> operands,
                       ImplicationMode implication = ImplicationMode::residuum);

}  // namespace sbr::logic
