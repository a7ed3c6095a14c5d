#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbr/kernels/gram.hpp"
#include "sbr/logic/constraint.hpp"
#include "sbr/logic/formula.hpp"
#include "sbr/logic/tnorm.hpp"

namespace sbr::learner {

inline constexpr std::size_t kUnmapped = std::numeric_limits<std::size_t>::max();

// One predicate to learn (or to read from a fixed table).
//
// A learned task owns a kernel expansion over the examples of its Gram
// matrix; `labeled[i]` marks the supervised rows and `targets[i]` their 0/1
// label. `table_index` maps each cell of the predicate's truth table (one
// cell per domain element, row-major pairs for arity 2) to an expansion row;
// kUnmapped cells read as 0. A given task carries `given_values` instead,
// one per table cell, and never changes.
struct TaskSpec {
  std::string predicate;
  std::size_t arity = 1;
  logic::BindingMode mode = logic::BindingMode::learned;
  std::shared_ptr<const kernels::GramMatrix> gram;
  std::vector<bool> labeled;
  Eigen::VectorXd targets;
  std::vector<std::size_t> table_index;
  std::vector<double> given_values;

  std::size_t expansion_size() const { return gram ? gram->size() : 0; }
};

struct TrainConfig {
  double lambda_r = 1.0;
  double lambda_c = 1.0;
  logic::TNormKind tnorm = logic::TNormKind::product;
  logic::ImplicationMode implication = logic::ImplicationMode::residuum;
  double learning_rate = 1.0;        // initial step of every line search
  std::size_t max_iterations = 5000; // per stage
  double tolerance = 1e-12;          // relative objective change that ends a stage
  double gradient_tolerance = 1e-10; // stage 1 also needs max |d| below this
  bool backtracking = true;          // off: fixed steps of learning_rate
  std::size_t divergence_steps = 20; // consecutive increases that abort training
  double threshold = 0.5;
  double undecided_band = 1e-3;
};

// Validates the config; throws std::invalid_argument.
void validate(const TrainConfig& config);

// Tasks plus the constraints compiled over a single domain "Prot" of
// `domain_size` elements. Every predicate a rule mentions must be a task.
struct Problem {
  std::vector<TaskSpec> tasks;
  std::size_t domain_size = 0;
  logic::Signature signature;  // slot k belongs to tasks[k]
  std::vector<logic::CompiledConstraint> constraints;

  std::size_t task_index(const std::string& predicate) const { return signature.slot(predicate); }
};

// Throws std::invalid_argument on inconsistent task shapes, duplicate
// predicates, or rules over unknown predicates.
Problem build_problem(std::vector<TaskSpec> tasks, std::size_t domain_size, const std::vector<logic::Formula>& rules,
                      logic::TNormKind tnorm, logic::ImplicationMode implication = logic::ImplicationMode::residuum);

}  // namespace sbr::learner
