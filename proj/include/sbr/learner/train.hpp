#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbr/learner/problem.hpp"

namespace sbr::learner {

// One weight vector per task, indexed like Problem::tasks; given tasks hold
// an empty vector.
using Weights = std::vector<Eigen::VectorXd>;

Weights zero_weights(const Problem& problem);

struct Model {
  std::vector<std::string> predicates;  // task order
  Weights alpha;
  std::vector<double> trace;            // objective before the first step, then after every step
  std::size_t stage_boundary = 0;       // first trace entry that belongs to stage 2
  bool stage1_converged = false;
  bool stage2_converged = false;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw scores s = G alpha over the expansion, and truths f = clamp(s, 0, 1).
Eigen::VectorXd decision_values(const TaskSpec& task, const Eigen::VectorXd& alpha);
Eigen::VectorXd fuzzy_truths(const Eigen::VectorXd& scores);

// Truth tables of every predicate slot, ready for constraint evaluation.
logic::PredicateValues predicate_values(const Problem& problem, const Weights& alpha);

// lambda_R Σ αᵀGα + Σ_labeled (s − y)² + lambda_c Σ φ.
double objective(const Problem& problem, const Weights& alpha, double lambda_r, double lambda_c);

// Euclidean gradient ∂E/∂α.
Weights objective_gradient(const Problem& problem, const Weights& alpha, double lambda_r, double lambda_c);

// Functional (kernel-preconditioned) gradient d with ∂E/∂α = G d. Training
// steps along −d.
Weights descent_direction(const Problem& problem, const Weights& alpha, double lambda_r, double lambda_c);

// Distance of the current point to the non-differentiable set of the
// objective: scores at the clamp corners 0 and 1, and the constraint kinks.
double objective_kink_margin(const Problem& problem, const Weights& alpha, double lambda_c);

// Stage 1 from α = 0 with lambda_c = 0, then stage 2 from that solution with
// the configured lambda_c (skipped when it is 0 or there are no rules).
// Throws TrainingDiverged on a non-finite objective or on
// `divergence_steps` consecutive increases.
Model train(const Problem& problem, const TrainConfig& config);

struct TaskPrediction {
  std::string predicate;
  std::vector<double> truth;      // per expansion row, or per table cell for a given task
  std::vector<bool> positive;     // truth >= threshold
  std::vector<bool> undecided;    // |truth − threshold| < undecided band
};

std::vector<TaskPrediction> predict(const Model& model, const Problem& problem, const TrainConfig& config);

}  // namespace sbr::learner
