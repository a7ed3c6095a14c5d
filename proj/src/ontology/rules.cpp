#include "sbr/ontology/rules.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sbr::ontology {

using logic::Expr;
using logic::Formula;
using logic::NodeKind;
using logic::Quantifier;
using logic::QuantifierKind;

namespace {

const std::string kDomain(kProteinDomain);
const std::string kBound(kBoundPredicate);

Formula over_x(Expr body) {
  return Formula{{Quantifier{QuantifierKind::forall, 1, "x", kDomain}}, std::move(body)};
}

Formula over_xy(Expr body) {
  return Formula{{Quantifier{QuantifierKind::forall, 1, "x", kDomain}, Quantifier{QuantifierKind::forall, 1, "y", kDomain}},
                 std::move(body)};
}

Expr unary(const std::string& predicate, const char* var) { return Expr::atom(predicate, {var}); }

Formula implication(const std::string& from, const std::string& to) {
  return over_x(Expr::binary(NodeKind::implication, unary(from, "x"), unary(to, "x")));
}

}  // namespace

std::vector<Formula> generate_oc_rules(const GoCut& cut) {
  std::vector<Formula> rules;
  for (const auto& node : cut.nodes())
    for (std::size_t p : node.parents) rules.push_back(implication(node.predicate, cut.node(p).predicate));
  for (const auto& node : cut.nodes()) {
    if (node.children.empty()) continue;
    std::vector<Expr> disjuncts;
    for (std::size_t c : node.children) disjuncts.push_back(unary(cut.node(c).predicate, "x"));
    rules.push_back(over_x(Expr::binary(NodeKind::implication, unary(node.predicate, "x"),
                                        logic::disjunction_of(std::move(disjuncts)))));
  }
  return rules;
}

std::vector<Formula> generate_part_of_rules(const GoCut& cut, const OntologyDag& dag) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& e : dag.edges()) {
    if (e.relation != Relation::part_of) continue;
    const auto& q = dag.term(e.child).id;
    const auto& p = dag.term(e.parent).id;
    if (cut.contains(q) && cut.contains(p)) pairs.emplace_back(cut.index_of(q), cut.index_of(p));
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<Formula> rules;
  for (const auto& [q, p] : pairs) rules.push_back(implication(cut.node(q).predicate, cut.node(p).predicate));
  return rules;
}

PpiRules generate_ppi_rules(const GoCut& cut, PpiVariant variant, logic::BindingMode bound_mode) {
  PpiRules out;
  out.bound_mode = bound_mode;
  const Expr bound = Expr::atom(kBound, {"x", "y"});
  if (variant == PpiVariant::pp) {
    for (const auto& node : cut.nodes()) {
      if (node.bin) continue;
      out.rules.push_back(over_xy(Expr::binary(
          NodeKind::implication, bound,
          Expr::binary(NodeKind::equivalence, unary(node.predicate, "x"), unary(node.predicate, "y")))));
    }
    return out;
  }
  std::vector<Expr> shared;
  for (const auto& node : cut.nodes()) {
    if (node.bin || node.ns != "biological_process") continue;
    shared.push_back(Expr::binary(NodeKind::conjunction, unary(node.predicate, "x"), unary(node.predicate, "y")));
  }
  if (shared.empty()) throw std::invalid_argument("DPP rule needs at least one biological-process predicate in the cut");
  out.rules.push_back(over_xy(Expr::binary(NodeKind::implication, bound, logic::disjunction_of(std::move(shared)))));
  return out;
}

PpiStatistics ppi_statistics(const std::vector<std::pair<std::string, std::string>>& pairs,
                             const AnnotationSet& annotations, const GoCut& cut) {
  std::set<std::pair<std::string, std::string>> unique;
  for (const auto& [a, b] : pairs) {
    if (a == b) continue;
    unique.emplace(std::min(a, b), std::max(a, b));
  }

  auto restricted = [&](const std::string& protein) {
    std::set<std::string> out;
    auto it = annotations.find(protein);
    if (it == annotations.end()) return out;
    for (const auto& t : it->second)
      if (cut.contains(t) && !cut.node(cut.index_of(t)).bin) out.insert(t);
    return out;
  };

  PpiStatistics stats;
  std::vector<std::size_t> column;
  for (std::size_t i = 0; i < cut.size(); ++i) {
    if (cut.node(i).bin) continue;
    column.push_back(i);
    stats.sharing.push_back({cut.node(i).id});
  }

  std::vector<double> jaccard;
  for (const auto& [a, b] : unique) {
    const auto sa = restricted(a);
    const auto sb = restricted(b);
    for (std::size_t k = 0; k < column.size(); ++k) {
      const auto& id = stats.sharing[k].id;
      const bool ia = sa.count(id) != 0, ib = sb.count(id) != 0;
      stats.sharing[k].pos += ia && ib;
      stats.sharing[k].tot += ia || ib;
    }
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    if (uni > 0) jaccard.push_back(static_cast<double>(inter) / static_cast<double>(uni));
  }
  for (auto& s : stats.sharing)
    if (s.tot > 0) s.ratio = static_cast<double>(s.pos) / static_cast<double>(s.tot);

  auto& j = stats.jaccard;
  j.pairs = jaccard.size();
  if (!jaccard.empty()) {
    double sum = 0.0;
    for (double v : jaccard) sum += v;
    j.mean = sum / static_cast<double>(j.pairs);
    double sq = 0.0;
    for (double v : jaccard) sq += (v - j.mean) * (v - j.mean);
    j.stddev = std::sqrt(sq / static_cast<double>(j.pairs));
    std::sort(jaccard.begin(), jaccard.end());
    const std::size_t mid = j.pairs / 2;
    j.median = j.pairs % 2 ? jaccard[mid] : (jaccard[mid - 1] + jaccard[mid]) / 2;
  }
  return stats;
}

}  // namespace sbr::ontology
