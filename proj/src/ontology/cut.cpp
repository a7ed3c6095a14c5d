#include "sbr/ontology/cut.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "sbr/io/text.hpp"

namespace sbr::ontology {

GoCut::GoCut(std::vector<CutNode> nodes) : nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) throw DagError("duplicate cut node " + nodes_[i].id);
    if (!by_predicate_.emplace(nodes_[i].predicate, i).second) {
      throw DagError("cut nodes collide on predicate name " + nodes_[i].predicate);
    }
    nodes_[i].children.clear();
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& parents = nodes_[i].parents;
    std::sort(parents.begin(), parents.end());
    parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
    for (std::size_t p : parents) {
      if (p >= n || p == i) throw DagError("cut node " + nodes_[i].id + " has an invalid parent");
      if (nodes_[p].bin) throw DagError("bin node " + nodes_[p].id + " cannot be a parent");
      nodes_[p].children.push_back(i);
    }
    if (nodes_[i].bin && parents.size() != 1) throw DagError("bin node " + nodes_[i].id + " needs exactly one parent");
  }
  for (auto& node : nodes_) {
    std::stable_partition(node.children.begin(), node.children.end(), [&](std::size_t c) { return !nodes_[c].bin; });
  }
}

std::size_t GoCut::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("term " + id + " is not in the cut");
  return it->second;
}

std::size_t GoCut::index_of_predicate(const std::string& predicate) const {
  auto it = by_predicate_.find(predicate);
  if (it == by_predicate_.end()) throw std::out_of_range("predicate " + predicate + " is not in the cut");
  return it->second;
}

std::size_t GoCut::bin_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const CutNode& n) { return n.bin; }));
}

std::string predicate_name(std::string_view id) {
  std::string out(id);
  std::replace(out.begin(), out.end(), ':', '_');
  return out;
}

std::string bin_id(std::string_view anchor_id) { return "BIN:" + std::string(anchor_id); }

GoCut go_cut(const OntologyDag& dag, const AnnotationSet& annotations, const std::set<std::string>& namespaces,
             std::size_t l, std::size_t c) {
  std::set<std::string> wanted;
  for (const auto& ns : namespaces) wanted.insert(canonical_namespace(ns));

  std::vector<std::set<std::string>> proteins(dag.size());
  for (const auto& [protein, terms] : annotations) {
    for (const auto& id : terms) {
      if (dag.contains(id)) proteins[dag.index_of(id)].insert(protein);
    }
  }

  std::vector<bool> retained(dag.size(), false);
  for (std::size_t t = 0; t < dag.size(); ++t) {
    retained[t] = wanted.count(dag.term(t).ns) && dag.level(t) <= l && proteins[t].size() >= c;
  }

  // Build with DAG indices first, remap after sorting.
  struct Draft {
    CutNode node;
    std::vector<std::string> parent_ids;
  };
  std::vector<Draft> drafts;
  for (std::size_t t = 0; t < dag.size(); ++t) {
    if (!retained[t]) continue;
    const Term& term = dag.term(t);
    Draft d;
    d.node.id = term.id;
    d.node.name = term.name;
    d.node.ns = term.ns;
    d.node.level = dag.level(t);
    d.node.proteins = proteins[t];
    for (std::size_t p : dag.parents(t))
      if (retained[p]) d.parent_ids.push_back(dag.term(p).id);

    bool any_kept = false;
    std::set<std::string> pruned_proteins;
    bool any_pruned = false;
    for (std::size_t ch : dag.children(t)) {
      if (retained[ch]) {
        any_kept = true;
      } else {
        any_pruned = true;
        pruned_proteins.insert(proteins[ch].begin(), proteins[ch].end());
      }
    }
    if (any_kept && any_pruned) {
      Draft b;
      b.node.id = bin_id(term.id);
      b.node.name = "bin of " + (term.name.empty() ? term.id : term.name);
      b.node.ns = term.ns;
      b.node.level = d.node.level + 1;
      b.node.bin = true;
      std::set_intersection(pruned_proteins.begin(), pruned_proteins.end(), proteins[t].begin(), proteins[t].end(),
                            std::inserter(b.node.proteins, b.node.proteins.end()));
      b.parent_ids.push_back(term.id);
      drafts.push_back(std::move(b));
    }
    drafts.push_back(std::move(d));
  }
  if (drafts.empty()) {
    throw DagError("empty GO cut: no term has level <= " + std::to_string(l) + " and >= " + std::to_string(c) +
                   " proteins in the requested namespaces");
  }

  std::sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    return std::tie(a.node.level, a.node.id) < std::tie(b.node.level, b.node.id);
  });
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < drafts.size(); ++i) where.emplace(drafts[i].node.id, i);
  std::vector<CutNode> nodes;
  nodes.reserve(drafts.size());
  for (auto& d : drafts) {
    for (const auto& pid : d.parent_ids) d.node.parents.push_back(where.at(pid));
    d.node.predicate = predicate_name(d.node.id);
    d.node.protein_count = d.node.proteins.size();
    nodes.push_back(std::move(d.node));
  }
  return GoCut(std::move(nodes));
}

std::string format_cut_tsv(const GoCut& cut) {
  std::string out = "id\tpredicate\tname\tnamespace\tlevel\tbin\tparents\tproteins\n";
  for (const auto& n : cut.nodes()) {
    std::string parents;
    for (std::size_t p : n.parents) {
      if (!parents.empty()) parents += ',';
      parents += cut.node(p).id;
    }
    out += n.id + '\t' + n.predicate + '\t' + n.name + '\t' + n.ns + '\t' + std::to_string(n.level) + '\t' +
           (n.bin ? "1" : "0") + '\t' + parents + '\t' + std::to_string(n.protein_count) + '\n';
  }
  return out;
}

std::vector<CutNode> parse_cut_tsv(std::string_view text) {
  auto lines = io::content_lines(text);
  if (lines.empty() || lines[0].second.rfind("id\t", 0) != 0) throw io::IoError("cut file lacks its header row");
  auto number = [](const std::string& s, std::size_t line_no) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw io::IoError("cut file line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
    return v;
  };
  std::vector<CutNode> nodes;
  std::vector<std::vector<std::string>> parent_ids;
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line_no, line] = lines[r];
    auto f = io::split(line, '\t');
    if (f.size() != 8) throw io::IoError("cut file line " + std::to_string(line_no) + ": expected 8 columns");
    CutNode n;
    n.id = f[0];
    n.predicate = f[1];
    n.name = f[2];
    n.ns = f[3];
    n.level = number(f[4], line_no);
    n.bin = f[5] == "1";
    n.protein_count = number(f[7], line_no);
    std::vector<std::string> ps;
    if (!f[6].empty()) ps = io::split(f[6], ',');
    where.emplace(n.id, nodes.size());
    nodes.push_back(std::move(n));
    parent_ids.push_back(std::move(ps));
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& pid : parent_ids[i]) {
      auto it = where.find(pid);
      if (it == where.end()) throw io::IoError("cut file: parent " + pid + " of " + nodes[i].id + " is not listed");
      nodes[i].parents.push_back(it->second);
    }
  }
  return nodes;
}

}  // namespace sbr::ontology
