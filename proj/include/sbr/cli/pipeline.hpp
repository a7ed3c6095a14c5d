#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbr/cli/config.hpp"
#include "sbr/eval/folds.hpp"
#include "sbr/kernels/build.hpp"
#include "sbr/kernels/gram.hpp"
#include "sbr/logic/formula.hpp"
#include "sbr/ontology/cut.hpp"
#include "sbr/ontology/dag.hpp"

namespace sbr::cli {

// Overrides given on the command line; unset fields keep the config value.
struct RunOptions {
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
};

// Everything the subcommands derive from the input files.
struct Dataset {
  ontology::OntologyDag dag;
  ontology::AnnotationSet annotations;  // closed, kept proteins only
  std::vector<std::string> proteins;    // kept, sorted
  ontology::GoCut cut;
  kernels::FeatureStore features;
  std::vector<std::pair<std::string, std::string>> ppi;  // pairs among kept proteins
  std::optional<kernels::GramMatrix> precomputed;        // the `gram` file, when configured
};

// Reads the ontology and annotations, closes them, and keeps the proteins
// with at least one annotation in every analyzed namespace (and, for
// feature-based kernels, the required feature). Each drop is logged.
Dataset load_dataset(const ExperimentConfig& config);

// The protein Gram: the precomputed file restricted to the kept proteins, or
// the configured kernel built over them. Throws if the PSD check fails.
kernels::GramMatrix protein_gram(const ExperimentConfig& config, const Dataset& data, std::size_t jobs);

struct RuleBundle {
  std::vector<logic::Formula> rules;
  bool uses_bound = false;
  bool bound_learned = false;
};

RuleBundle build_rules(const ExperimentConfig& config, const Dataset& data);

// Folds over the kept proteins, stratified by the non-bin cut terms.
eval::Folds make_folds(const ExperimentConfig& config, const Dataset& data, std::uint64_t seed);

// Thin wrappers; each writes into `out` atomically and returns the paths written.
std::vector<std::filesystem::path> cmd_kernel(const ExperimentConfig& config, const std::filesystem::path& out,
                                              const RunOptions& options = {});
std::vector<std::filesystem::path> cmd_rules(const ExperimentConfig& config, const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_folds(const ExperimentConfig& config, const std::filesystem::path& out,
                                             const RunOptions& options = {});
std::vector<std::filesystem::path> cmd_stats(const ExperimentConfig& config, const std::filesystem::path& out);

struct RunResult {
  bool ok = true;
  std::vector<std::string> failures;  // one diagnostic per failed fold
};

// Cross-validated training. Bundle layout under `out`: config.txt, cut.tsv,
// rules.txt, folds.tsv, fold_<i>/{predictions.tsv, model.json}, metrics.txt,
// node_stats.tsv, curves/{macro_pr,micro_pr}.csv, result_tree.dot. A failing
// fold writes fold_<i>/error.txt; the aggregate files are then not written.
RunResult cmd_run(const ExperimentConfig& config, const std::filesystem::path& out, const RunOptions& options = {});

// DOT rendering of a bundle's cut.tsv and node_stats.tsv.
std::string result_tree_dot(const std::vector<ontology::CutNode>& cut, const std::string& node_stats_tsv);
std::filesystem::path cmd_export_tree(const std::filesystem::path& bundle, const std::filesystem::path& out);

}  // namespace sbr::cli
