#include "sbr/ontology/dag.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>

#include <spdlog/spdlog.h>

#include "sbr/io/text.hpp"

namespace sbr::ontology {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::is_a: return "is_a";
    case Relation::part_of: return "part_of";
    case Relation::regulates: return "regulates";
    case Relation::occurs_in: return "occurs_in";
  }
  return "unknown";
}

OntologyDag::OntologyDag(std::vector<Term> terms, const std::vector<RawEdge>& edges) {
  std::set<std::string> obsolete;
  std::set<std::string> declared;
  for (auto& t : terms) {
    if (!declared.insert(t.id).second) throw DagError("duplicate term " + t.id);
    if (t.obsolete) {
      obsolete.insert(t.id);
      continue;
    }
    index_.emplace(t.id, terms_.size());
    terms_.push_back(std::move(t));
  }

  const std::size_t n = terms_.size();
  parents_.assign(n, {});
  children_.assign(n, {});
  std::size_t dropped = 0;
  std::set<std::tuple<std::size_t, std::size_t, Relation>> seen;
  for (const auto& e : edges) {
    for (const auto* end : {&e.child, &e.parent}) {
      if (!declared.count(*end)) throw DagError("edge " + e.child + " -> " + e.parent + " references unknown term " + *end);
    }
    if (obsolete.count(e.child) || obsolete.count(e.parent)) {
      ++dropped;
      continue;
    }
    const std::size_t c = index_.at(e.child);
    const std::size_t p = index_.at(e.parent);
    if (c == p) throw DagError("self-edge on " + e.child);
    if (!seen.emplace(c, p, e.relation).second) continue;
    edges_.push_back({c, p, e.relation});
    if (e.relation == Relation::is_a) {
      parents_[c].push_back(p);
      children_[p].push_back(c);
    }
  }
  if (dropped > 0) spdlog::info("ontology: dropped {} edge(s) touching obsolete terms", dropped);
  for (auto& v : parents_) std::sort(v.begin(), v.end());
  for (auto& v : children_) std::sort(v.begin(), v.end());

  // Kahn's algorithm over is_a; whatever is never released sits on a cycle.
  std::vector<std::size_t> pending(n);
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = parents_[i].size();
    if (pending[i] == 0) {
      ready.push_back(i);
      roots_.push_back(i);
    }
  }
  std::size_t released = 0;
  while (!ready.empty()) {
    const std::size_t i = ready.front();
    ready.pop_front();
    ++released;
    for (std::size_t c : children_[i])
      if (--pending[c] == 0) ready.push_back(c);
  }
  if (released != n) {
    for (std::size_t i = 0; i < n; ++i)
      if (pending[i] > 0) throw DagError("is_a cycle through term " + terms_[i].id);
  }

  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  levels_.assign(n, kUnset);
  std::deque<std::size_t> queue;
  for (std::size_t r : roots_) {
    levels_[r] = 0;
    queue.push_back(r);
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t c : children_[i]) {
      if (levels_[c] == kUnset) {
        levels_[c] = levels_[i] + 1;
        queue.push_back(c);
      }
    }
  }

  std::size_t crossing = 0;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t p : parents_[c]) crossing += terms_[c].ns != terms_[p].ns;
  if (crossing > 0) spdlog::warn("ontology: {} is_a edge(s) cross namespaces", crossing);
}

std::size_t OntologyDag::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown term " + id);
  return it->second;
}

std::set<std::size_t> OntologyDag::ancestors(std::size_t i) const {
  std::set<std::size_t> out;
  std::vector<std::size_t> stack(parents_.at(i).begin(), parents_.at(i).end());
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    if (out.insert(p).second) stack.insert(stack.end(), parents_[p].begin(), parents_[p].end());
  }
  return out;
}

namespace {

// Drops trailing "! comment" and "{qualifiers}".
std::string_view strip_value(std::string_view v) {
  const auto bang = v.find(" !");
  if (bang != std::string_view::npos) v = v.substr(0, bang);
  const auto brace = v.find(" {");
  if (brace != std::string_view::npos) v = v.substr(0, brace);
  return io::trim(v);
}

}  // namespace

OntologyDag parse_obo(std::string_view text) {
  std::vector<Term> terms;
  std::vector<RawEdge> edges;
  bool in_term = false;
  Term current;
  std::vector<RawEdge> pending;
  auto flush = [&](std::size_t line_no) {
    if (!in_term) return;
    if (current.id.empty()) throw DagError("line " + std::to_string(line_no) + ": [Term] stanza without an id");
    for (auto& e : pending) e.child = current.id;
    edges.insert(edges.end(), pending.begin(), pending.end());
    terms.push_back(std::move(current));
    current = Term{};
    pending.clear();
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const auto line = io::trim(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (line.empty() || line.front() == '!') continue;
    if (line.front() == '[') {
      flush(line_no);
      in_term = line == "[Term]";
      continue;
    }
    if (!in_term) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const auto key = io::trim(line.substr(0, colon));
    const auto value = strip_value(line.substr(colon + 1));
    if (key == "id") {
      current.id = std::string(value);
    } else if (key == "name") {
      current.name = std::string(io::trim(line.substr(colon + 1)));
    } else if (key == "namespace") {
      current.ns = std::string(value);
    } else if (key == "is_obsolete") {
      current.obsolete = value == "true";
    } else if (key == "is_a") {
      pending.push_back({"", std::string(value), Relation::is_a});
    } else if (key == "relationship") {
      const auto space = value.find(' ');
      if (space == std::string_view::npos) {
        throw DagError("line " + std::to_string(line_no) + ": relationship without a target");
      }
      const auto type = value.substr(0, space);
      const auto target = std::string(io::trim(value.substr(space + 1)));
      if (type == "part_of") {
        pending.push_back({"", target, Relation::part_of});
      } else if (type == "regulates" || type == "positively_regulates" || type == "negatively_regulates") {
        pending.push_back({"", target, Relation::regulates});
      } else if (type == "occurs_in") {
        pending.push_back({"", target, Relation::occurs_in});
      }
    }
  }
  flush(line_no);
  return OntologyDag(std::move(terms), edges);
}

AnnotationSet tpr_closure(const AnnotationSet& raw, const OntologyDag& dag) {
  AnnotationSet out;
  std::unordered_map<std::size_t, std::set<std::size_t>> memo;
  for (const auto& [protein, terms] : raw) {
    auto& closed = out[protein];
    for (const auto& id : terms) {
      if (!dag.contains(id)) throw DagError("annotation of " + protein + " uses unknown term " + id);
      const std::size_t i = dag.index_of(id);
      auto it = memo.find(i);
      if (it == memo.end()) it = memo.emplace(i, dag.ancestors(i)).first;
      closed.insert(id);
      for (std::size_t a : it->second) closed.insert(dag.term(a).id);
    }
  }
  return out;
}

AnnotationSet parse_annotations(std::string_view text) {
  AnnotationSet out;
  for (auto& [protein, term] : io::parse_pairs_tsv(text)) out[protein].insert(term);
  return out;
}

std::string canonical_namespace(std::string_view name) {
  if (name == "BP" || name == "biological_process") return "biological_process";
  if (name == "MF" || name == "molecular_function") return "molecular_function";
  if (name == "CC" || name == "cellular_component") return "cellular_component";
  throw std::invalid_argument("unknown namespace '" + std::string(name) + "'");
}

}  // namespace sbr::ontology
