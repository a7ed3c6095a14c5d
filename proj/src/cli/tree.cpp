#include <map>

#include "sbr/cli/pipeline.hpp"
#include "sbr/io/text.hpp"

namespace sbr::cli {

namespace {

struct NodeScores {
  double precision = 0, recall = 0, f1 = 0;
};

std::string escaped(const std::string& s) {
  std::string out;
  for (const char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

double number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw io::IoError("node_stats.tsv: bad " + what + " '" + s + "'");
}

std::map<std::string, NodeScores> parse_node_stats(const std::string& tsv) {
  std::map<std::string, NodeScores> out;
  bool header = true;
  for (const auto& [line_no, line] : io::content_lines(tsv)) {
    if (header) {
      header = false;
      continue;
    }
    const auto f = io::split(line, '\t');
    if (f.size() != 13) throw io::IoError("node_stats.tsv:" + std::to_string(line_no) + ": expected 13 columns");
    out[f[0]] = {number(f[10], "precision"), number(f[11], "recall"), number(f[12], "f1")};
  }
  return out;
}

}  // namespace

std::string result_tree_dot(const std::vector<ontology::CutNode>& cut, const std::string& node_stats_tsv) {
  const auto scores = parse_node_stats(node_stats_tsv);
  std::string dot = "digraph result_tree {\n  rankdir=BT;\n  node [shape=box];\n";
  for (std::size_t i = 0; i < cut.size(); ++i) {
    const auto& n = cut[i];
    std::string label = escaped(n.name.empty() ? n.id : n.name);
    const auto it = scores.find(n.id);
    if (it != scores.end()) {
      label += "\\n" + io::format_double(it->second.precision, "P=%.3f") + io::format_double(it->second.recall, " R=%.3f") +
               io::format_double(it->second.f1, " F1=%.3f");
    }
    dot += "  n" + std::to_string(i) + " [label=\"" + label + "\"" + (n.bin ? ", style=dashed" : "") + "];\n";
  }
  for (std::size_t i = 0; i < cut.size(); ++i)
    for (const auto p : cut[i].parents) dot += "  n" + std::to_string(i) + " -> n" + std::to_string(p) + ";\n";
  return dot + "}\n";
}

std::filesystem::path cmd_export_tree(const std::filesystem::path& bundle, const std::filesystem::path& out) {
  const auto cut = ontology::parse_cut_tsv(io::read_file(bundle / "cut.tsv"));
  const auto dot = result_tree_dot(cut, io::read_file(bundle / "node_stats.tsv"));
  const auto path = out / "result_tree.dot";
  io::write_file_atomic(path, dot);
  return path;
}

}  // namespace sbr::cli
