#include "sbr/logic/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sbr::logic {

void Signature::declare_domain(const std::string& name, std::size_t size) {
  domains_[name] = size;
}

std::size_t Signature::declare_predicate(PredicateDecl decl) {
  if (decl.domains.empty() || decl.domains.size() > 2) {
    throw std::invalid_argument("predicate '" + decl.name + "' must have arity 1 or 2");
  }
  for (const auto& d : decl.domains) {
    if (!has_domain(d)) {
      throw std::invalid_argument("predicate '" + decl.name + "' uses undeclared domain '" + d + "'");
    }
  }
  if (has_predicate(decl.name)) {
    throw std::invalid_argument("predicate '" + decl.name + "' declared twice");
  }
  const std::size_t slot = predicates_.size();
  slots_[decl.name] = slot;
  predicates_.push_back(std::move(decl));
  return slot;
}

std::size_t Signature::domain_size(const std::string& name) const {
  auto it = domains_.find(name);
  if (it == domains_.end()) throw std::invalid_argument("unknown domain '" + name + "'");
  return it->second;
}

std::size_t Signature::slot(const std::string& name) const {
  auto it = slots_.find(name);
  if (it == slots_.end()) throw std::invalid_argument("unknown predicate '" + name + "'");
  return it->second;
}

std::size_t Signature::table_size(std::size_t slot) const {
  std::size_t n = 1;
  for (const auto& d : predicates_.at(slot).domains) n *= domain_size(d);
  return n;
}

PredicateValues Signature::make_values(double fill) const {
  PredicateValues values(predicates_.size());
  for (std::size_t s = 0; s < predicates_.size(); ++s) values[s].assign(table_size(s), fill);
  return values;
}

namespace {

double implies(TNormKind kind, ImplicationMode mode, double a, double b) {
  return mode == ImplicationMode::residuum ? residuum(kind, a, b) : material_implication(kind, a, b);
}

std::array<double, 2> implies_partials(TNormKind kind, ImplicationMode mode, double a, double b) {
  return mode == ImplicationMode::residuum ? residuum_partials(kind, a, b)
                                           : material_implication_partials(kind, a, b);
}

// Distance to the non-differentiable loci of T at (a, b).
double t_norm_margin(TNormKind kind, double a, double b) {
  switch (kind) {
    case TNormKind::minimum: return std::abs(a - b);
    case TNormKind::product: return std::numeric_limits<double>::infinity();
    case TNormKind::lukasiewicz: return std::abs(a + b - 1.0);
  }
  return 0.0;
}

double implies_margin(TNormKind kind, ImplicationMode mode, double a, double b) {
  if (mode == ImplicationMode::material) return t_norm_margin(kind, a, 1.0 - b);
  double m = std::abs(a - b);
  if (kind == TNormKind::product) m = std::min(m, std::abs(a - kResiduumGuard));
  return m;
}

// Indices of the `count` smallest values, ties broken by lower index.
std::vector<std::size_t> smallest(std::span<const double> v, std::size_t count) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  order.resize(count);
  return order;
}

double aggregate_violations(QuantifierKind kind, std::size_t count, std::span<const double> v) {
  switch (kind) {
    case QuantifierKind::forall: return std::accumulate(v.begin(), v.end(), 0.0);
    case QuantifierKind::exists: return *std::min_element(v.begin(), v.end());
    case QuantifierKind::exists_n: {
      // Summed in grounding order, so exists[|S|] and forall agree to the bit.
      auto chosen = smallest(v, count);
      std::sort(chosen.begin(), chosen.end());
      double sum = 0.0;
      for (std::size_t i : chosen) sum += v[i];
      return sum;
    }
  }
  return 0.0;
}

}  // namespace

double aggregate_quantifier(QuantifierKind kind, std::span<const double> truths, std::size_t count) {
  if (truths.empty()) {
    throw std::domain_error("quantifier over an empty grounding set");
  }
  if (kind == QuantifierKind::exists_n && (count == 0 || count > truths.size())) {
    throw std::domain_error("exists[" + std::to_string(count) + "] over " +
                            std::to_string(truths.size()) + " groundings");
  }
  std::vector<double> violations(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (!(truths[i] >= 0.0 && truths[i] <= 1.0)) {
      throw std::domain_error("grounding truth outside [0,1]");
    }
    violations[i] = 1.0 - truths[i];
  }
  return aggregate_violations(kind, count, violations);
}

CompiledConstraint compile(const Formula& formula, TNormKind tnorm, const Signature& signature,
                           ImplicationMode implication) {
  CompiledConstraint c;
  c.source_ = formula;
  c.tnorm_ = tnorm;
  c.implication_ = implication;
  c.grounding_count_ = 1;

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < formula.quantifiers.size(); ++i) {
    const Quantifier& q = formula.quantifiers[i];
    const std::size_t size = signature.domain_size(q.domain);
    if (size == 0) {
      throw std::invalid_argument("domain '" + q.domain + "' is empty");
    }
    if (q.kind == QuantifierKind::exists_n && q.count > size) {
      throw std::domain_error("exists[" + std::to_string(q.count) + "] over domain '" + q.domain +
                              "' of size " + std::to_string(size));
    }
    if (!position.emplace(q.variable, i).second) {
      throw std::invalid_argument("duplicate quantified variable '" + q.variable + "'");
    }
    c.domain_sizes_.push_back(size);
    c.grounding_count_ *= size;
  }
  if (formula.quantifiers.empty()) {
    throw std::invalid_argument("formula has no quantifier");
  }

  c.table_sizes_.resize(signature.predicate_count());
  for (std::size_t s = 0; s < signature.predicate_count(); ++s) c.table_sizes_[s] = signature.table_size(s);

  // Postorder flattening of the body.
  auto emit = [&](auto&& self, const Expr& e) -> int {
    CompiledConstraint::Node node;
    node.kind = e.kind;
    if (e.kind == NodeKind::atom) {
      if (!signature.has_predicate(e.predicate)) {
        throw std::invalid_argument("unknown predicate '" + e.predicate + "'");
      }
      node.slot = signature.slot(e.predicate);
      const PredicateDecl& decl = signature.predicate(node.slot);
      if (decl.domains.size() != e.args.size()) {
        throw std::invalid_argument("arity mismatch for '" + e.predicate + "': declared " +
                                    std::to_string(decl.domains.size()) + ", used with " +
                                    std::to_string(e.args.size()));
      }
      node.arity = static_cast<int>(e.args.size());
      for (std::size_t a = 0; a < e.args.size(); ++a) {
        auto it = position.find(e.args[a]);
        if (it == position.end()) {
          throw std::invalid_argument("unbound variable '" + e.args[a] + "'");
        }
        if (formula.quantifiers[it->second].domain != decl.domains[a]) {
          throw std::invalid_argument("argument " + std::to_string(a + 1) + " of '" + e.predicate +
                                      "' ranges over '" + formula.quantifiers[it->second].domain +
                                      "', expected '" + decl.domains[a] + "'");
        }
        (a == 0 ? node.arg0 : node.arg1) = it->second;
      }
      if (node.arity == 2) node.stride = signature.domain_size(decl.domains[1]);
      if (std::find(c.referenced_slots_.begin(), c.referenced_slots_.end(), node.slot) ==
          c.referenced_slots_.end()) {
        c.referenced_slots_.push_back(node.slot);
      }
    } else {
      node.lhs = self(self, e.children.at(0));
      if (e.kind != NodeKind::negation) node.rhs = self(self, e.children.at(1));
    }
    c.program_.push_back(node);
    return static_cast<int>(c.program_.size() - 1);
  };
  emit(emit, formula.body);
  return c;
}

void CompiledConstraint::check_values(const PredicateValues& values) const {
  for (std::size_t slot : referenced_slots_) {
    if (slot >= values.size() || values[slot].size() != table_sizes_[slot]) {
      throw std::invalid_argument("predicate table shape does not match the signature");
    }
    for (double v : values[slot]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::domain_error("predicate value outside [0,1]");
      }
    }
  }
}

void CompiledConstraint::bind(std::size_t grounding, std::vector<std::size_t>& binding) const {
  binding.resize(domain_sizes_.size());
  for (std::size_t i = domain_sizes_.size(); i-- > 0;) {
    binding[i] = grounding % domain_sizes_[i];
    grounding /= domain_sizes_[i];
  }
}

double CompiledConstraint::forward(const PredicateValues& values, const std::vector<std::size_t>& binding,
                                   std::vector<double>& out) const {
  out.resize(program_.size());
  for (std::size_t i = 0; i < program_.size(); ++i) {
    const Node& n = program_[i];
    switch (n.kind) {
      case NodeKind::atom: {
        const std::size_t cell = n.arity == 1 ? binding[n.arg0] : binding[n.arg0] * n.stride + binding[n.arg1];
        out[i] = values[n.slot][cell];
        break;
      }
      case NodeKind::negation: out[i] = negation(out[n.lhs]); break;
      case NodeKind::conjunction: out[i] = t_norm(tnorm_, out[n.lhs], out[n.rhs]); break;
      case NodeKind::disjunction: out[i] = t_conorm(tnorm_, out[n.lhs], out[n.rhs]); break;
      case NodeKind::implication: out[i] = implies(tnorm_, implication_, out[n.lhs], out[n.rhs]); break;
      case NodeKind::equivalence: out[i] = equivalence(tnorm_, out[n.lhs], out[n.rhs], implication_); break;
    }
  }
  return out.back();
}

std::vector<double> CompiledConstraint::truths(const PredicateValues& values) const {
  check_values(values);
  std::vector<double> t(grounding_count_);
  std::vector<std::size_t> binding;
  std::vector<double> scratch;
  for (std::size_t g = 0; g < grounding_count_; ++g) {
    bind(g, binding);
    t[g] = forward(values, binding, scratch);
  }
  return t;
}

double CompiledConstraint::aggregate(const std::vector<double>& violations) const {
  std::vector<double> level = violations;
  for (std::size_t q = domain_sizes_.size(); q-- > 0;) {
    const std::size_t width = domain_sizes_[q];
    const Quantifier& quant = source_.quantifiers[q];
    std::vector<double> next(level.size() / width);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = aggregate_violations(quant.kind, quant.count,
                                     std::span<const double>(level.data() + i * width, width));
    }
    level = std::move(next);
  }
  return level.front();
}

// d(penalty)/d(violation) per grounding: products of 0/1 selections along
// the quantifier nesting.
std::vector<double> CompiledConstraint::selection_weights(const std::vector<double>& violations) const {
  const std::size_t depth = domain_sizes_.size();
  std::vector<std::vector<double>> levels(depth + 1);
  levels[depth] = violations;
  for (std::size_t q = depth; q-- > 0;) {
    const std::size_t width = domain_sizes_[q];
    const Quantifier& quant = source_.quantifiers[q];
    levels[q].resize(levels[q + 1].size() / width);
    for (std::size_t i = 0; i < levels[q].size(); ++i) {
      levels[q][i] = aggregate_violations(quant.kind, quant.count,
                                          std::span<const double>(levels[q + 1].data() + i * width, width));
    }
  }
  std::vector<double> weights{1.0};
  for (std::size_t q = 0; q < depth; ++q) {
    const std::size_t width = domain_sizes_[q];
    const Quantifier& quant = source_.quantifiers[q];
    std::vector<double> next(weights.size() * width, 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      std::span<const double> group(levels[q + 1].data() + i * width, width);
      switch (quant.kind) {
        case QuantifierKind::forall:
          for (std::size_t c = 0; c < width; ++c) next[i * width + c] = weights[i];
          break;
        case QuantifierKind::exists:
          next[i * width + smallest(group, 1).front()] = weights[i];
          break;
        case QuantifierKind::exists_n:
          for (std::size_t c : smallest(group, quant.count)) next[i * width + c] = weights[i];
          break;
      }
    }
    weights = std::move(next);
  }
  return weights;
}

double CompiledConstraint::penalty(const PredicateValues& values) const {
  std::vector<double> t = truths(values);
  for (double& x : t) x = 1.0 - x;
  return aggregate(t);
}

double CompiledConstraint::accumulate_gradient(const PredicateValues& values, PredicateValues& gradient,
                                               double scale) const {
  std::vector<double> violations = truths(values);
  for (double& x : violations) x = 1.0 - x;
  const double phi = aggregate(violations);
  for (std::size_t slot : referenced_slots_) {
    if (slot >= gradient.size() || gradient[slot].size() != table_sizes_[slot]) {
      throw std::invalid_argument("gradient table shape does not match the signature");
    }
  }
  const std::vector<double> weights = selection_weights(violations);

  std::vector<std::size_t> binding;
  std::vector<double> node_values;
  std::vector<double> adjoint(program_.size());
  for (std::size_t g = 0; g < grounding_count_; ++g) {
    if (weights[g] == 0.0) continue;
    bind(g, binding);
    forward(values, binding, node_values);
    std::fill(adjoint.begin(), adjoint.end(), 0.0);
    adjoint.back() = -weights[g] * scale;  // violation = 1 - t_E
    for (std::size_t i = program_.size(); i-- > 0;) {
      const Node& n = program_[i];
      const double up = adjoint[i];
      if (up == 0.0) continue;
      std::array<double, 2> d{0.0, 0.0};
      switch (n.kind) {
        case NodeKind::atom: {
          const std::size_t cell =
              n.arity == 1 ? binding[n.arg0] : binding[n.arg0] * n.stride + binding[n.arg1];
          gradient[n.slot][cell] += up;
          continue;
        }
        case NodeKind::negation: adjoint[n.lhs] -= up; continue;
        case NodeKind::conjunction: d = t_norm_partials(tnorm_, node_values[n.lhs], node_values[n.rhs]); break;
        case NodeKind::disjunction: d = t_conorm_partials(tnorm_, node_values[n.lhs], node_values[n.rhs]); break;
        case NodeKind::implication:
          d = implies_partials(tnorm_, implication_, node_values[n.lhs], node_values[n.rhs]);
          break;
        case NodeKind::equivalence:
          d = equivalence_partials(tnorm_, node_values[n.lhs], node_values[n.rhs], implication_);
          break;
      }
      adjoint[n.lhs] += up * d[0];
      adjoint[n.rhs] += up * d[1];
    }
  }
  return phi;
}

double CompiledConstraint::kink_margin(const PredicateValues& values) const {
  check_values(values);
  double margin = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> binding;
  std::vector<double> v;
  std::vector<double> violations(grounding_count_);
  for (std::size_t g = 0; g < grounding_count_; ++g) {
    bind(g, binding);
    violations[g] = 1.0 - forward(values, binding, v);
    for (std::size_t i = 0; i < program_.size(); ++i) {
      const Node& n = program_[i];
      switch (n.kind) {
        case NodeKind::atom: margin = std::min({margin, v[i], 1.0 - v[i]}); break;
        case NodeKind::negation: break;
        case NodeKind::conjunction: margin = std::min(margin, t_norm_margin(tnorm_, v[n.lhs], v[n.rhs])); break;
        case NodeKind::disjunction:
          margin = std::min(margin, t_norm_margin(tnorm_, 1.0 - v[n.lhs], 1.0 - v[n.rhs]));
          break;
        case NodeKind::implication:
          margin = std::min(margin, implies_margin(tnorm_, implication_, v[n.lhs], v[n.rhs]));
          break;
        case NodeKind::equivalence: {
          const double a = v[n.lhs];
          const double b = v[n.rhs];
          margin = std::min({margin, implies_margin(tnorm_, implication_, a, b),
                             implies_margin(tnorm_, implication_, b, a),
                             t_norm_margin(tnorm_, implies(tnorm_, implication_, a, b),
                                           implies(tnorm_, implication_, b, a))});
          break;
        }
      }
    }
  }
  // Selection boundaries of exists / exists[n] at every nesting level.
  std::vector<double> level = violations;
  for (std::size_t q = domain_sizes_.size(); q-- > 0;) {
    const std::size_t width = domain_sizes_[q];
    const Quantifier& quant = source_.quantifiers[q];
    std::vector<double> next(level.size() / width);
    for (std::size_t i = 0; i < next.size(); ++i) {
      std::span<const double> group(level.data() + i * width, width);
      next[i] = aggregate_violations(quant.kind, quant.count, group);
      const std::size_t cut = quant.kind == QuantifierKind::exists ? 1
                              : quant.kind == QuantifierKind::exists_n ? quant.count
                                                                       : width;
      if (cut < width) {
        std::vector<double> sorted(group.begin(), group.end());
        std::sort(sorted.begin(), sorted.end());
        margin = std::min(margin, sorted[cut] - sorted[cut - 1]);
      }
    }
    level = std::move(next);
  }
  return margin;
}

double penalty_gradient(const CompiledConstraint& constraint, const PredicateValues& values,
                        std::size_t slot, std::size_t cell) {
  PredicateValues gradient(values.size());
  for (std::size_t s = 0; s < values.size(); ++s) gradient[s].assign(values[s].size(), 0.0);
  constraint.accumulate_gradient(values, gradient);
  return gradient.at(slot).at(cell);
}

}  // namespace sbr::logic
