#include "sbr/learner/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace sbr::learner {

void validate(const TrainConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid training config: ") + what);
  };
  require(c.lambda_r >= 0.0 && std::isfinite(c.lambda_r), "lambda_r must be >= 0");
  require(c.lambda_c >= 0.0 && std::isfinite(c.lambda_c), "lambda_c must be >= 0");
  require(c.learning_rate > 0.0 && std::isfinite(c.learning_rate), "learning rate must be > 0");
  require(c.max_iterations > 0, "max iterations must be > 0");
  require(c.tolerance > 0.0, "tolerance must be > 0");
  require(c.gradient_tolerance > 0.0, "gradient tolerance must be > 0");
  require(c.divergence_steps > 0, "divergence steps must be > 0");
  require(c.threshold > 0.0 && c.threshold < 1.0, "threshold must lie in (0,1)");
  require(c.undecided_band >= 0.0, "undecided band must be >= 0");
}

namespace {

void check_task(const TaskSpec& t, std::size_t table_size) {
  const std::string who = "task " + t.predicate + ": ";
  if (t.arity != 1 && t.arity != 2) throw std::invalid_argument(who + "arity must be 1 or 2");
  if (t.mode == logic::BindingMode::given) {
    if (t.given_values.size() != table_size) {
      throw std::invalid_argument(who + "given table has " + std::to_string(t.given_values.size()) + " cells, expected " +
                                  std::to_string(table_size));
    }
    for (double v : t.given_values)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(who + "given values must lie in [0,1]");
    return;
  }
  if (!t.gram) throw std::invalid_argument(who + "learned task without a Gram matrix");
  const std::size_t n = t.gram->size();
  if (t.labeled.size() != n || static_cast<std::size_t>(t.targets.size()) != n) {
    throw std::invalid_argument(who + "labels do not match the expansion size " + std::to_string(n));
  }
  if (t.table_index.size() != table_size) {
    throw std::invalid_argument(who + "table index has " + std::to_string(t.table_index.size()) +
                                " cells, expected " + std::to_string(table_size));
  }
  for (std::size_t r : t.table_index)
    if (r != kUnmapped && r >= n) throw std::invalid_argument(who + "table index points outside the expansion");
}

}  // namespace

Problem build_problem(std::vector<TaskSpec> tasks, std::size_t domain_size, const std::vector<logic::Formula>& rules,
                      logic::TNormKind tnorm, logic::ImplicationMode implication) {
  Problem p;
  p.domain_size = domain_size;
  p.signature.declare_domain("Prot", domain_size);
  for (const auto& t : tasks) {
    if (p.signature.has_predicate(t.predicate)) throw std::invalid_argument("duplicate task " + t.predicate);
    logic::PredicateDecl decl{t.predicate, std::vector<std::string>(t.arity, "Prot"), t.mode};
    if (t.arity != 1 && t.arity != 2) throw std::invalid_argument("task " + t.predicate + ": arity must be 1 or 2");
    const std::size_t slot = p.signature.declare_predicate(std::move(decl));
    check_task(t, p.signature.table_size(slot));
  }
  p.tasks = std::move(tasks);
  if (!rules.empty() && domain_size == 0) throw std::invalid_argument("rules need a non-empty constraint domain");
  for (const auto& r : rules) p.constraints.push_back(logic::compile(r, tnorm, p.signature, implication));
  return p;
}

}  // namespace sbr::learner
