#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbr/kernels/build.hpp"
#include "sbr/learner/problem.hpp"

namespace sbr::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RuleSet { oc, part_of, pp1, pp2, dpp1, dpp2 };

std::string_view to_string(RuleSet r);
RuleSet parse_rule_set(std::string_view name);

// One experiment. Relative paths are resolved against the config file's
// directory when loaded from disk.
struct ExperimentConfig {
  using Path = std::optional<std::filesystem::path>;

  Path obo, annotations;
  Path sequences, domains, expression, complexes;  // kernel features
  Path gram;                                       // precomputed protein Gram, replaces `kernel`
  Path ppi;                                        // interacting pairs: given BOUND and `stats`
  Path pair_gram;                                  // Gram over "a|b" pair ids for a learned BOUND

  std::vector<std::string> namespaces{"biological_process"};
  std::size_t level = 3;
  std::size_t min_proteins = 2;

  kernels::KernelSpec kernel;
  std::vector<RuleSet> rules;  // empty: no rules
  bool constrain_all = false;  // constraints over every example, not only the held-out fold

  learner::TrainConfig train;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t curve_samples = 100;
  std::size_t jobs = 0;  // 0: one worker per fold
};

// Flat `key = value` lines; `#` starts a comment line. Unknown keys,
// malformed values and duplicate keys are errors that name the line.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

// Also checks that every referenced input file exists.
ExperimentConfig load_config(const std::filesystem::path& path);

// Every key with its effective value, one per line, in a fixed order.
std::string format_config(const ExperimentConfig& config);

}  // namespace sbr::cli
