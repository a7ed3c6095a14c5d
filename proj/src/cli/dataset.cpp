#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "sbr/cli/pipeline.hpp"
#include "sbr/io/text.hpp"
#include "sbr/kernels/io.hpp"
#include "sbr/ontology/rules.hpp"

namespace sbr::cli {

namespace {

std::string read(const ExperimentConfig::Path& p, const char* key) {
  if (!p) throw ConfigError(std::string("config needs `") + key + "`");
  return io::read_file(*p);
}

std::string ratio_text(const std::optional<double>& r) { return r ? io::format_double(*r, "%.3f") : "NA"; }

}  // namespace

Dataset load_dataset(const ExperimentConfig& c) {
  Dataset d;
  d.dag = ontology::parse_obo(read(c.obo, "obo"));

  ontology::AnnotationSet raw = ontology::parse_annotations(read(c.annotations, "annotations"));
  std::size_t unknown = 0;
  for (auto& [protein, terms] : raw) {
    for (auto it = terms.begin(); it != terms.end();) {
      if (d.dag.contains(*it)) {
        ++it;
      } else {
        spdlog::debug("annotation {} -> {} dropped: term not in the ontology", protein, *it);
        it = terms.erase(it);
        ++unknown;
      }
    }
  }
  if (unknown) spdlog::warn("{} annotation(s) reference terms outside the ontology and were dropped", unknown);
  const auto closed = ontology::tpr_closure(raw, d.dag);

  if (c.sequences) d.features.sequences = kernels::parse_fasta(io::read_file(*c.sequences));
  if (c.domains) d.features.domains = kernels::parse_annotation_sets(io::read_file(*c.domains));
  if (c.expression) d.features.expression = kernels::parse_expression_csv(io::read_file(*c.expression));
  if (c.complexes) d.features.interactions = kernels::parse_edge_list(io::read_file(*c.complexes));
  if (c.gram) d.precomputed = kernels::read_gram_csv(*c.gram);

  if (!c.gram) {
    using kernels::KernelKind;
    if (c.kernel.kind == KernelKind::spectrum && !c.sequences) throw ConfigError("spectrum kernel needs `sequences`");
    if (c.kernel.kind == KernelKind::correlation && !c.expression) {
      throw ConfigError("correlation kernel needs `expression`");
    }
    if (c.kernel.kind == KernelKind::domain && !c.domains) throw ConfigError("domain kernel needs `domains`");
    if (c.kernel.kind == KernelKind::diffusion && !c.complexes) throw ConfigError("diffusion kernel needs `complexes`");
  }

  for (const auto& [protein, terms] : closed) {
    std::string reason;
    for (const auto& ns : c.namespaces) {
      const bool any = std::any_of(terms.begin(), terms.end(),
                                   [&](const std::string& t) { return d.dag.term(d.dag.index_of(t)).ns == ns; });
      if (!any) {
        reason = "no annotation in " + ns;
        break;
      }
    }
    if (reason.empty()) {
      if (d.precomputed && !d.precomputed->contains(protein)) reason = "not in the Gram file";
      else if (!c.gram && c.kernel.kind == kernels::KernelKind::spectrum && !d.features.sequences.count(protein))
        reason = "no sequence";
      else if (!c.gram && c.kernel.kind == kernels::KernelKind::correlation && !d.features.expression.count(protein))
        reason = "no expression profile";
    }
    if (!reason.empty()) {
      spdlog::info("protein {} dropped: {}", protein, reason);
      continue;
    }
    d.proteins.push_back(protein);
    d.annotations.emplace(protein, terms);
  }
  if (d.proteins.empty()) throw ConfigError("no protein survives the dataset filters");
  spdlog::info("{} of {} annotated proteins kept", d.proteins.size(), closed.size());

  const std::set<std::string> namespaces(c.namespaces.begin(), c.namespaces.end());
  d.cut = ontology::go_cut(d.dag, d.annotations, namespaces, c.level, c.min_proteins);

  if (c.ppi) {
    const std::set<std::string> kept(d.proteins.begin(), d.proteins.end());
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : kernels::parse_edge_list(io::read_file(*c.ppi))) {
      if (!kept.count(e.a) || !kept.count(e.b)) continue;
      if (seen.insert(std::minmax(e.a, e.b)).second) d.ppi.emplace_back(std::minmax(e.a, e.b));
    }
    spdlog::info("{} interacting pair(s) among kept proteins", d.ppi.size());
  }
  return d;
}

kernels::GramMatrix protein_gram(const ExperimentConfig& c, const Dataset& d, std::size_t jobs) {
  kernels::GramMatrix g = d.precomputed ? d.precomputed->submatrix(d.proteins)
                                        : kernels::build_gram(c.kernel, d.proteins, d.features, std::max<std::size_t>(jobs, 1));
  if (d.precomputed && c.kernel.normalize) g = kernels::normalize_gram(g);
  const auto psd = kernels::psd_check(g);
  if (!psd.pass) {
    throw std::runtime_error("protein Gram matrix is not PSD (min eigenvalue " + io::format_double(psd.min_eigenvalue) +
                             ")");
  }
  return g;
}

RuleBundle build_rules(const ExperimentConfig& c, const Dataset& d) {
  RuleBundle b;
  auto append = [&](std::vector<logic::Formula> rules) {
    for (auto& r : rules) b.rules.push_back(std::move(r));
  };
  for (const auto r : c.rules) {
    switch (r) {
      case RuleSet::oc: append(ontology::generate_oc_rules(d.cut)); break;
      case RuleSet::part_of: append(ontology::generate_part_of_rules(d.cut, d.dag)); break;
      case RuleSet::pp1:
      case RuleSet::pp2:
      case RuleSet::dpp1:
      case RuleSet::dpp2: {
        const auto variant = r == RuleSet::pp1 || r == RuleSet::pp2 ? ontology::PpiVariant::pp : ontology::PpiVariant::dpp;
        const bool learned = r == RuleSet::pp2 || r == RuleSet::dpp2;
        append(ontology::generate_ppi_rules(d.cut, variant,
                                            learned ? logic::BindingMode::learned : logic::BindingMode::given)
                   .rules);
        b.uses_bound = true;
        b.bound_learned = learned;
        break;
      }
    }
  }
  return b;
}

eval::Folds make_folds(const ExperimentConfig& c, const Dataset& d, std::uint64_t seed) {
  std::map<std::string, std::set<std::string>> terms;
  for (const auto& node : d.cut.nodes())
    if (!node.bin) terms.emplace(node.id, node.proteins);
  return eval::generate_folds(c.folds, d.proteins, terms, seed);
}

std::vector<std::filesystem::path> cmd_kernel(const ExperimentConfig& c, const std::filesystem::path& out,
                                              const RunOptions& o) {
  const auto d = load_dataset(c);
  const auto g = protein_gram(c, d, o.jobs.value_or(c.jobs ? c.jobs : 1));
  const auto path = out / "gram.csv";
  io::write_file_atomic(path, kernels::format_gram_csv(g));
  return {path};
}

std::vector<std::filesystem::path> cmd_rules(const ExperimentConfig& c, const std::filesystem::path& out) {
  const auto d = load_dataset(c);
  const auto b = build_rules(c, d);
  std::string text;
  for (const auto& r : b.rules) text += logic::to_string(r) + "\n";
  io::write_file_atomic(out / "rules.txt", text);
  io::write_file_atomic(out / "cut.tsv", ontology::format_cut_tsv(d.cut));
  spdlog::info("{} rule(s) over {} predicate(s)", b.rules.size(), d.cut.size());
  return {out / "rules.txt", out / "cut.tsv"};
}

std::vector<std::filesystem::path> cmd_folds(const ExperimentConfig& c, const std::filesystem::path& out,
                                             const RunOptions& o) {
  const auto d = load_dataset(c);
  const auto folds = make_folds(c, d, o.seed.value_or(c.seed));
  io::write_file_atomic(out / "folds.tsv", eval::format_folds_tsv(folds));
  return {out / "folds.tsv"};
}

std::vector<std::filesystem::path> cmd_stats(const ExperimentConfig& c, const std::filesystem::path& out) {
  if (!c.ppi) throw ConfigError("stats needs a `ppi` pair file");
  const auto d = load_dataset(c);
  const auto stats = ontology::ppi_statistics(d.ppi, d.annotations, d.cut);
  std::string sharing = "id\tname\tPOS\tTOT\tRATIO\n";
  for (const auto& s : stats.sharing) {
    const auto& node = d.cut.node(d.cut.index_of(s.id));
    sharing += s.id + "\t" + node.name + "\t" + std::to_string(s.pos) + "\t" + std::to_string(s.tot) + "\t" +
               ratio_text(s.ratio) + "\n";
  }
  const auto& j = stats.jaccard;
  const std::string jaccard = "pairs = " + std::to_string(j.pairs) + "\nmean = " + io::format_double(j.mean, "%.6f") +
                              "\nmedian = " + io::format_double(j.median, "%.6f") +
                              "\nstddev = " + io::format_double(j.stddev, "%.6f") + "\n";
  io::write_file_atomic(out / "ppi_sharing.tsv", sharing);
  io::write_file_atomic(out / "ppi_jaccard.txt", jaccard);
  return {out / "ppi_sharing.tsv", out / "ppi_jaccard.txt"};
}

}  // namespace sbr::cli
