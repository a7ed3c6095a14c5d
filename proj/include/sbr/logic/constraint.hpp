#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sbr/logic/formula.hpp"
#include "sbr/logic/tnorm.hpp"

namespace sbr::logic {

// Whether a predicate's values come from a trained model or from a fixed table.
enum class BindingMode { learned, given };

struct PredicateDecl {
  std::string name;
  std::vector<std::string> domains;  // one entry per argument
  BindingMode mode = BindingMode::learned;
};

// Truth tables indexed by predicate slot. A unary table has one cell per
// domain element; a binary table is row-major over (first, second) argument.
using PredicateValues = std::vector<std::vector<double>>;

// Domains and predicates a constraint can be compiled against.
class Signature {
 public:
  void declare_domain(const std::string& name, std::size_t size);
  // Returns the slot assigned to the predicate.
  std::size_t declare_predicate(PredicateDecl decl);

  bool has_domain(const std::string& name) const { return domains_.count(name) != 0; }
  std::size_t domain_size(const std::string& name) const;

  bool has_predicate(const std::string& name) const { return slots_.count(name) != 0; }
  std::size_t slot(const std::string& name) const;
  const PredicateDecl& predicate(std::size_t slot) const { return predicates_.at(slot); }
  std::size_t predicate_count() const { return predicates_.size(); }
  std::size_t table_size(std::size_t slot) const;

  // Tables of the right shape, filled with `fill`.
  PredicateValues make_values(double fill = 0.0) const;

 private:
  std::map<std::string, std::size_t> domains_;
  std::map<std::string, std::size_t> slots_;
  std::vector<PredicateDecl> predicates_;
};

// A formula bound to a t-norm and to the slots/domains of a Signature.
//
// Groundings are enumerated as the cartesian product of the quantified
// domains in quantifier order, the last quantifier varying fastest. The
// penalty aggregates 1 - t_E per grounding: sums for forall, the minimum for
// exists, the n smallest for exists[n]; nested quantifiers aggregate from the
// innermost outwards.
class CompiledConstraint {
 public:
  const Formula& source() const { return source_; }
  TNormKind tnorm() const { return tnorm_; }
  ImplicationMode implication() const { return implication_; }
  std::size_t grounding_count() const { return grounding_count_; }
  const std::vector<std::size_t>& referenced_slots() const { return referenced_slots_; }

  // Per-grounding truth t_E in enumeration order.
  std::vector<double> truths(const PredicateValues& values) const;

  double penalty(const PredicateValues& values) const;

  // Adds scale * dphi/dvalue into `gradient` (same shape as `values`) and
  // returns the penalty.
  double accumulate_gradient(const PredicateValues& values, PredicateValues& gradient,
                             double scale = 1.0) const;

  // Smallest distance, over all groundings, of any intermediate quantity to
  // a point where the penalty is not differentiable (residuum boundary,
  // min ties, Lukasiewicz clamp, quantifier selection ties, table edges).
  double kink_margin(const PredicateValues& values) const;

 private:
  friend CompiledConstraint compile(const Formula&, TNormKind, const Signature&, ImplicationMode);

  struct Node {
    NodeKind kind = NodeKind::atom;
    int lhs = -1;
    int rhs = -1;
    std::size_t slot = 0;
    int arity = 0;
    std::size_t arg0 = 0;  // quantifier positions
    std::size_t arg1 = 0;
    std::size_t stride = 1;  // size of the second argument's domain
  };

  void check_values(const PredicateValues& values) const;
  void bind(std::size_t grounding, std::vector<std::size_t>& binding) const;
  double forward(const PredicateValues& values, const std::vector<std::size_t>& binding,
                 std::vector<double>& node_values) const;
  std::vector<double> selection_weights(const std::vector<double>& violations) const;
  double aggregate(const std::vector<double>& violations) const;

  Formula source_;
  TNormKind tnorm_ = TNormKind::product;
  ImplicationMode implication_ = ImplicationMode::residuum;
  std::vector<std::size_t> domain_sizes_;
  std::vector<std::size_t> table_sizes_;  // indexed by slot, for shape checks
  std::size_t grounding_count_ = 0;
  std::vector<Node> program_;  // postorder, root last
  std::vector<std::size_t> referenced_slots_;
};

// Throws std::invalid_argument on unknown predicates or domains, arity or
// domain mismatches, and empty domains; std::domain_error when exists[n]
// asks for more groundings than its domain holds.
CompiledConstraint compile(const Formula& formula, TNormKind tnorm, const Signature& signature,
                           ImplicationMode implication = ImplicationMode::residuum);

// dphi/dvalue for one cell of one predicate table.
double penalty_gradient(const CompiledConstraint& constraint, const PredicateValues& values,
                        std::size_t slot, std::size_t cell);

// Penalty of a single quantifier over per-grounding truths t_E. `count` is
// the n of exists[n] and ignored otherwise. Throws std::domain_error on an
// empty grounding set, count > |truths|, count == 0, or truths outside [0,1].
double aggregate_quantifier(QuantifierKind kind, std::span<const double> truths,
                            std::size_t count = 1);

}  // namespace sbr::logic
