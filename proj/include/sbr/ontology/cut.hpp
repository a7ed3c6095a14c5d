#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sbr/ontology/dag.hpp"

namespace sbr::ontology {

// One predicate of a cut: a retained term or a bin node.
struct CutNode {
  std::string id;         // term id, or BIN:<anchor id> for a bin node
  std::string predicate;  // rule-grammar identifier derived from id
  std::string name;
  std::string ns;
  std::size_t level = 0;
  bool bin = false;
  std::vector<std::size_t> parents;   // node indices; a bin node's only parent is its anchor
  std::vector<std::size_t> children;  // retained is_a children, then the bin node if any
  std::set<std::string> proteins;
  std::size_t protein_count = 0;  // proteins.size(), kept when read back from a cut file
};

// Retained terms and bin nodes, ordered by (level, id). Immutable.
class GoCut {
 public:
  GoCut() = default;
  explicit GoCut(std::vector<CutNode> nodes);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<CutNode>& nodes() const { return nodes_; }
  const CutNode& node(std::size_t i) const { return nodes_.at(i); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  std::size_t index_of(const std::string& id) const;
  // Lookup by rule-grammar predicate name.
  bool has_predicate(const std::string& predicate) const { return by_predicate_.count(predicate) != 0; }
  std::size_t index_of_predicate(const std::string& predicate) const;

  std::size_t bin_count() const;

 private:
  std::vector<CutNode> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> by_predicate_;
};

// Maps a term id onto the predicate alphabet: ':' becomes '_'.
std::string predicate_name(std::string_view id);
std::string bin_id(std::string_view anchor_id);

// Retained = terms of `namespaces` with level <= l and at least c annotated
// proteins. A retained term with at least one retained and one pruned is_a
// child gets a bin node holding the pruned children's proteins (within its
// own). Throws DagError when nothing survives.
GoCut go_cut(const OntologyDag& dag, const AnnotationSet& annotations, const std::set<std::string>& namespaces,
             std::size_t l, std::size_t c);

// cut.tsv: id, predicate, name, namespace, level, bin, parents (comma-joined
// ids), protein count. The protein sets are not persisted.
std::string format_cut_tsv(const GoCut& cut);
std::vector<CutNode> parse_cut_tsv(std::string_view text);

}  // namespace sbr::ontology
