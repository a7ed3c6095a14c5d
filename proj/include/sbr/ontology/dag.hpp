#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sbr::ontology {

enum class Relation { is_a, part_of, regulates, occurs_in };

std::string_view to_string(Relation r);

struct Term {
  std::string id;
  std::string name;
  std::string ns;  // biological_process, molecular_function or cellular_component
  bool obsolete = false;
};

// child -> parent edge as read from the ontology, by term id.
struct RawEdge {
  std::string child;
  std::string parent;
  Relation relation = Relation::is_a;
};

struct Edge {
  std::size_t child = 0;
  std::size_t parent = 0;
  Relation relation = Relation::is_a;
};

class DagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Typed-relation DAG over non-obsolete terms. Roots are terms without an is_a
// parent; level is the shortest is_a path length from a root.
class OntologyDag {
 public:
  // Drops obsolete terms and every edge touching one. Throws DagError on a
  // duplicate id, an edge to an id that was never declared, or an is_a cycle.
  OntologyDag(std::vector<Term> terms, const std::vector<RawEdge>& edges);
  OntologyDag() = default;

  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& term(std::size_t i) const { return terms_.at(i); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  // Throws std::out_of_range.
  std::size_t index_of(const std::string& id) const;

  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }   // is_a
  const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); } // is_a
  const std::vector<Edge>& edges() const { return edges_; }                                  // all relations
  std::size_t level(std::size_t i) const { return levels_.at(i); }
  const std::vector<std::size_t>& roots() const { return roots_; }

  // Every is_a ancestor of i, excluding i.
  std::set<std::size_t> ancestors(std::size_t i) const;

 private:
  std::vector<Term> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> levels_;
  std::vector<std::size_t> roots_;
};

// OBO 1.2 subset: [Term] stanzas with id, name, namespace, is_a,
// relationship and is_obsolete. Other stanzas are skipped; positively_ and
// negatively_regulates fold into regulates; other relationship types are
// ignored.
OntologyDag parse_obo(std::string_view text);

// protein id -> term ids.
using AnnotationSet = std::map<std::string, std::set<std::string>>;

// Closes every protein's set upward over is_a. Throws DagError on a term
// absent from the DAG.
AnnotationSet tpr_closure(const AnnotationSet& raw, const OntologyDag& dag);

// `protein<TAB>term_id` rows grouped by protein.
AnnotationSet parse_annotations(std::string_view text);

// Accepts the full namespace names and the short forms BP, MF, CC.
std::string canonical_namespace(std::string_view name);

}  // namespace sbr::ontology
