#include "sbr/learner/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

namespace sbr::learner {

namespace {

bool learned(const TaskSpec& t) { return t.mode == logic::BindingMode::learned; }

void check_shapes(const Problem& problem, const Weights& alpha) {
  if (alpha.size() != problem.tasks.size()) throw std::invalid_argument("weights do not match the task count");
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const auto& t = problem.tasks[k];
    const auto want = learned(t) ? t.expansion_size() : 0;
    if (static_cast<std::size_t>(alpha[k].size()) != want) {
      throw std::invalid_argument("weights of task " + t.predicate + " have the wrong length");
    }
  }
}

bool constrained(const Problem& problem, double lambda_c) { return lambda_c != 0.0 && !problem.constraints.empty(); }

double clamp01(double s) { return std::clamp(s, 0.0, 1.0); }

// Per-row adjoint of λ_C Σ φ with respect to the truths, before the clamp.
std::vector<Eigen::VectorXd> constraint_adjoints(const Problem& problem, const Weights& alpha, double lambda_c) {
  std::vector<Eigen::VectorXd> out(problem.tasks.size());
  for (std::size_t k = 0; k < problem.tasks.size(); ++k)
    out[k] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(alpha[k].size()));
  if (!constrained(problem, lambda_c)) return out;
  const auto values = predicate_values(problem, alpha);
  auto grad = problem.signature.make_values(0.0);
  for (const auto& c : problem.constraints) c.accumulate_gradient(values, grad, lambda_c);
  for (std::size_t k = 0; k < problem.tasks.size(); ++k) {
    const auto& t = problem.tasks[k];
    if (!learned(t)) continue;
    for (std::size_t cell = 0; cell < t.table_index.size(); ++cell) {
      if (t.table_index[cell] != kUnmapped) out[k](static_cast<Eigen::Index>(t.table_index[cell])) += grad[k][cell];
    }
  }
  return out;
}

}  // namespace

Weights zero_weights(const Problem& problem) {
  Weights w;
  for (const auto& t : problem.tasks) w.push_back(Eigen::VectorXd::Zero(learned(t) ? static_cast<Eigen::Index>(t.expansion_size()) : 0));
  return w;
}

Eigen::VectorXd decision_values(const TaskSpec& task, const Eigen::VectorXd& alpha) {
  if (!task.gram || static_cast<std::size_t>(alpha.size()) != task.gram->size()) {
    throw std::invalid_argument("weights of task " + task.predicate + " do not match its Gram matrix");
  }
  return task.gram->matrix() * alpha;
}

Eigen::VectorXd fuzzy_truths(const Eigen::VectorXd& scores) { return scores.unaryExpr(&clamp01); }

logic::PredicateValues predicate_values(const Problem& problem, const Weights& alpha) {
  check_shapes(problem, alpha);
  auto values = problem.signature.make_values(0.0);
  for (std::size_t k = 0; k < problem.tasks.size(); ++k) {
    const auto& t = problem.tasks[k];
    if (!learned(t)) {
      values[k] = t.given_values;
      continue;
    }
    const Eigen::VectorXd f = fuzzy_truths(decision_values(t, alpha[k]));
    for (std::size_t cell = 0; cell < t.table_index.size(); ++cell) {
      const auto row = t.table_index[cell];
      values[k][cell] = row == kUnmapped ? 0.0 : f(static_cast<Eigen::Index>(row));
    }
  }
  return values;
}

double objective(const Problem& problem, const Weights& alpha, double lambda_r, double lambda_c) {
  check_shapes(problem, alpha);
  double e = 0.0;
  for (std::size_t k = 0; k < problem.tasks.size(); ++k) {
    const auto& t = problem.tasks[k];
    if (!learned(t)) continue;
    const Eigen::VectorXd s = decision_values(t, alpha[k]);
    e += lambda_r * alpha[k].dot(s);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (t.labeled[static_cast<std::size_t>(i)]) e += (s(i) - t.targets(i)) * (s(i) - t.targets(i));
    }
  }
  if (constrained(problem, lambda_c)) {
    const auto values = predicate_values(problem, alpha);
    double phi = 0.0;
    for (const auto& c : problem.constraints) phi += c.penalty(values);
    e += lambda_c * phi;
  }
  return e;
}

Weights descent_direction(const Problem& problem, const Weights& alpha, double lambda_r, double lambda_c) {
  check_shapes(problem, alpha);
  auto adjoint = constraint_adjoints(problem, alpha, lambda_c);
  Weights d(problem.tasks.size());
  for (std::size_t k = 0; k < problem.tasks.size(); ++k) {
    const auto& t = problem.tasks[k];
    if (!learned(t)) continue;
    const Eigen::VectorXd s = decision_values(t, alpha[k]);
    Eigen::VectorXd dk = 2.0 * lambda_r * alpha[k];
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (t.labeled[static_cast<std::size_t>(i)]) dk(i) += 2.0 * (s(i) - t.targets(i));
      // Subgradient of the clamp: 1 on the closed interval [0,1], 0 outside,
      // so unlabeled rows resting at s = 0 can still be lifted by a rule.
      if (s(i) >= 0.0 && s(i) <= 1.0) dk(i) += adjoint[k](i);
    }
    d[k] = std::move(dk);
  }
  return d;
}

Weights objective_gradient(const Problem& problem, const Weights& alpha, double lambda_r, double lambda_c) {
  Weights d = descent_direction(problem, alpha, lambda_r, lambda_c);
  for (std::size_t k = 0; k < d.size(); ++k)
    if (learned(problem.tasks[k])) d[k] = problem.tasks[k].gram->matrix() * d[k];
  return d;
}

double objective_kink_margin(const Problem& problem, const Weights& alpha, double lambda_c) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < problem.tasks.size(); ++k) {
    const auto& t = problem.tasks[k];
    if (!learned(t)) continue;
    const Eigen::VectorXd s = decision_values(t, alpha[k]);
    for (std::size_t row : t.table_index) {
      if (row == kUnmapped) continue;
      const double v = s(static_cast<Eigen::Index>(row));
      margin = std::min({margin, std::abs(v), std::abs(v - 1.0)});
    }
  }
  if (constrained(problem, lambda_c)) {
    const auto values = predicate_values(problem, alpha);
    for (const auto& c : problem.constraints) margin = std::min(margin, c.kink_margin(values));
  }
  return margin;
}

namespace {

double max_abs(const Weights& d) {
  double m = 0.0;
  for (const auto& v : d)
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

double directional(const Problem& problem, const Weights& d) {
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k)
    if (learned(problem.tasks[k])) sum += d[k].dot(problem.tasks[k].gram->matrix() * d[k]);
  return sum;
}

// Σ_k trace(G_k) |d_k|²: dᵀGd below a rounding multiple of this means d lies
// numerically in the null space of G.
double null_space_floor(const Problem& problem, const Weights& d) {
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k)
    if (learned(problem.tasks[k])) sum += problem.tasks[k].gram->matrix().trace() * d[k].squaredNorm();
  return sum;
}

Weights step(const Weights& alpha, const Weights& d, double eta) {
  Weights out = alpha;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (out[k].size() > 0) out[k] -= eta * d[k];
  return out;
}

// Returns whether the stage met its convergence test. Both stages stop on a
// small relative objective change. Stage 1 is a smooth convex quadratic whose
// objective hardly sees the low-eigenvalue directions of G, so it also waits
// for the functional gradient d itself to vanish. With a singular G, d may
// settle in the null space, where α stays non-unique; the true gradient G d is
// then zero to rounding, which also counts as stationary.
bool run_stage(const Problem& problem, const TrainConfig& config, double lambda_c, int stage, Weights& alpha,
                      std::vector<double>& trace) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 60;
  constexpr double kRoundoff = 64 * std::numeric_limits<double>::epsilon();
  double e = objective(problem, alpha, config.lambda_r, lambda_c);
  if (!std::isfinite(e)) throw TrainingDiverged("stage " + std::to_string(stage) + ": objective is not finite at the start");
  trace.push_back(e);
  std::size_t increases = 0;
  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    const Weights d = descent_direction(problem, alpha, config.lambda_r, lambda_c);
    const double slope = directional(problem, d);  // dᵀ G d = ⟨d, ∇E⟩
    if (!std::isfinite(slope)) throw TrainingDiverged("stage " + std::to_string(stage) + ": gradient is not finite");
    const bool stationary = stage != 1 || max_abs(d) <= config.gradient_tolerance ||
                            slope <= kRoundoff * null_space_floor(problem, d);
    if (slope <= 0.0 && stationary) return true;

    Weights next;
    double e_next = 0.0;
    if (config.backtracking) {
      double eta = config.learning_rate;
      bool accepted = false;
      for (int h = 0; h <= kMaxHalvings; ++h, eta *= 0.5) {
        next = step(alpha, d, eta);
        e_next = objective(problem, next, config.lambda_r, lambda_c);
        if (std::isfinite(e_next) && e_next <= e - kArmijo * eta * slope) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        spdlog::debug("stage {}: line search stalled after {} iterations", stage, it);
        return false;
      }
    } else {
      next = step(alpha, d, config.learning_rate);
      e_next = objective(problem, next, config.lambda_r, lambda_c);
      if (!std::isfinite(e_next)) {
        throw TrainingDiverged("stage " + std::to_string(stage) + ": objective became non-finite at iteration " +
                               std::to_string(it + 1));
      }
      increases = e_next > e ? increases + 1 : 0;
      if (increases >= config.divergence_steps) {
        throw TrainingDiverged("stage " + std::to_string(stage) + ": objective grew for " + std::to_string(increases) +
                               " consecutive steps (now " + std::to_string(e_next) + "); lower the learning rate");
      }
    }
    const double change = std::abs(e - e_next) / std::max(std::abs(e), std::numeric_limits<double>::min());
    alpha = std::move(next);
    e = e_next;
    trace.push_back(e);
    if (change < config.tolerance && stationary) return true;
  }
  return false;
}

}  // namespace

Model train(const Problem& problem, const TrainConfig& config) {
  validate(config);
  if (std::none_of(problem.tasks.begin(), problem.tasks.end(), learned)) {
    throw std::invalid_argument("training needs at least one learned task");
  }
  Model model;
  for (const auto& t : problem.tasks) model.predicates.push_back(t.predicate);
  model.alpha = zero_weights(problem);
  model.stage1_converged = run_stage(problem, config, 0.0, 1, model.alpha, model.trace);
  model.stage_boundary = model.trace.size();
  if (constrained(problem, config.lambda_c)) {
    model.stage2_converged = run_stage(problem, config, config.lambda_c, 2, model.alpha, model.trace);
  } else {
    model.stage2_converged = true;
  }
  spdlog::debug("trained {} task(s): {} stage-1 and {} stage-2 trace entries", problem.tasks.size(),
                model.stage_boundary, model.trace.size() - model.stage_boundary);
  return model;
}

std::vector<TaskPrediction> predict(const Model& model, const Problem& problem, const TrainConfig& config) {
  check_shapes(problem, model.alpha);
  std::vector<TaskPrediction> out;
  for (std::size_t k = 0; k < problem.tasks.size(); ++k) {
    const auto& t = problem.tasks[k];
    TaskPrediction p;
    p.predicate = t.predicate;
    if (learned(t)) {
      const Eigen::VectorXd f = fuzzy_truths(decision_values(t, model.alpha[k]));
      p.truth.assign(f.data(), f.data() + f.size());
    } else {
      p.truth = t.given_values;
    }
    for (double v : p.truth) {
      p.positive.push_back(v >= config.threshold);
      p.undecided.push_back(std::abs(v - config.threshold) < config.undecided_band);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace sbr::learner
