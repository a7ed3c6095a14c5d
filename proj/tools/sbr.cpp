#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "sbr/cli/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Semantic-based regularization for protein function prediction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = ".", bundle, log_level = "info";
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
  };
  auto* kernel = app.add_subcommand("kernel", "build the protein Gram matrix");
  with_config(kernel);
  kernel->add_option("--jobs", jobs, "worker threads");
  auto* rules = app.add_subcommand("rules", "write the cut and the generated rules");
  with_config(rules);
  auto* folds = app.add_subcommand("folds", "write the stratified folds");
  with_config(folds);
  folds->add_option("--seed", seed, "fold seed, overrides the config");
  auto* stats = app.add_subcommand("stats", "interaction statistics over the cut");
  with_config(stats);
  auto* run = app.add_subcommand("run", "cross-validated training and evaluation");
  with_config(run);
  run->add_option("--jobs", jobs, "worker threads");
  run->add_option("--seed", seed, "fold seed, overrides the config");
  auto* tree = app.add_subcommand("export-tree", "render a run bundle's result tree as DOT");
  tree->add_option("--bundle", bundle, "run output directory")->required()->check(CLI::ExistingDirectory);
  tree->add_option("--out", out_dir, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    using namespace sbr::cli;
    const RunOptions options{jobs, seed};
    if (tree->parsed()) {
      std::cout << cmd_export_tree(bundle, out_dir).string() << "\n";
      return EXIT_SUCCESS;
    }
    const auto config = load_config(config_path);
    std::vector<std::filesystem::path> written;
    if (kernel->parsed()) written = cmd_kernel(config, out_dir, options);
    if (rules->parsed()) written = cmd_rules(config, out_dir);
    if (folds->parsed()) written = cmd_folds(config, out_dir, options);
    if (stats->parsed()) written = cmd_stats(config, out_dir);
    if (run->parsed()) {
      const auto result = cmd_run(config, out_dir, options);
      for (const auto& f : result.failures) std::cerr << f << "\n";
      if (!result.ok) return 2;
      written.push_back(std::filesystem::path(out_dir) / "metrics.txt");
    }
    for (const auto& p : written) std::cout << p.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
