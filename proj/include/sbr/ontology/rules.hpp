#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbr/logic/constraint.hpp"
#include "sbr/logic/formula.hpp"
#include "sbr/ontology/cut.hpp"
#include "sbr/ontology/dag.hpp"

namespace sbr::ontology {

// Name of the protein domain and of the interaction predicate in generated rules.
inline constexpr std::string_view kProteinDomain = "Prot";
inline constexpr std::string_view kBoundPredicate = "BOUND";

// U => P for every parent P of every node U (bin nodes included), then
// U => (C1 or ... or Cm) for every node with children. Rules follow node order.
std::vector<logic::Formula> generate_oc_rules(const GoCut& cut);

// Q => P for every part_of edge Q -> P of `dag` with both ends in the cut.
std::vector<logic::Formula> generate_part_of_rules(const GoCut& cut, const OntologyDag& dag);

enum class PpiVariant { pp, dpp };

struct PpiRules {
  std::vector<logic::Formula> rules;
  logic::BindingMode bound_mode = logic::BindingMode::given;
};

// PP: BOUND(x,y) => (P(x) <=> P(y)) for every non-bin predicate.
// DPP: one rule BOUND(x,y) => ((P1(x) and P1(y)) or ...) over the non-bin
// biological-process predicates; throws std::invalid_argument if there are none.
PpiRules generate_ppi_rules(const GoCut& cut, PpiVariant variant, logic::BindingMode bound_mode);

struct PredicateSharing {
  std::string id;
  std::size_t pos = 0;  // pairs with both proteins annotated
  std::size_t tot = 0;  // pairs with at least one annotated
  std::optional<double> ratio;  // pos / tot, unset when tot = 0
};

struct JaccardSummary {
  std::size_t pairs = 0;  // pairs with a non-empty union
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population
};

struct PpiStatistics {
  std::vector<PredicateSharing> sharing;  // non-bin cut nodes in cut order
  JaccardSummary jaccard;
};

// Annotation sets are restricted to the cut's non-bin terms. Unordered
// duplicate pairs and self-pairs are counted once and never, respectively.
PpiStatistics ppi_statistics(const std::vector<std::pair<std::string, std::string>>& pairs,
                             const AnnotationSet& annotations, const GoCut& cut);

}  // namespace sbr::ontology
