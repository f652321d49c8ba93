#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "aoii/experiments.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool have_out = false, have_seed = false, have_threads = false;
};

aoii::ExperimentConfig load_config(const CliArgs& args) {
  aoii::ExperimentConfig cfg = args.config_path.empty()
                                   ? aoii::ExperimentConfig{}
                                   : aoii::ExperimentConfig::from_file(args.config_path);
  if (args.config_path.empty()) cfg.finalize();
  if (args.have_out) cfg.out_dir = args.out_dir;
  if (args.have_seed) {
    cfg.seed = args.seed;
    cfg.provided.insert("seed");
  }
  if (args.have_threads) {
    if (args.threads < 1 || args.threads > 256)
      throw aoii::ConfigError("--threads must lie in 1..256");
    cfg.threads = args.threads;
    cfg.provided.insert("threads");
  }
  for (const std::string& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal sampling and transmission scheduling for a binary Markov source "
               "over an energy-harvesting link"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  CliArgs args;
  app.add_option("--config", args.config_path, "Key = value experiment file");
  auto* out_opt = app.add_option("--out", args.out_dir, "Output directory (default: out)");
  auto* seed_opt = app.add_option("--seed", args.seed, "Override the simulation seed");
  auto* threads_opt = app.add_option("--threads", args.threads, "Worker threads for sweeps and replications");

  bool oracle = false;
  auto* solve = app.add_subcommand("solve", "Compute the optimal policy and its average cost");
  solve->add_flag("--oracle", oracle, "Also brute-force all policies (tiny instances only)");

  std::string sim_policy;
  bool with_trace = false;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo metrics for a policy");
  simulate->add_option("--policy", sim_policy, "Policy table from a previous solve");
  simulate->add_flag("--trace", with_trace, "Also dump a slot-level trace (first 10000 slots)");

  auto* sweep = app.add_subcommand("sweep-n", "Solve across a list of age truncation bounds");

  auto* compare = app.add_subcommand("compare", "Semantics-aware policy vs freshness baseline");

  std::string chain_policy;
  auto* analyze = app.add_subcommand("analyze-chain", "Recurrence structure of the model or a policy");
  analyze->add_option("--policy", chain_policy, "Analyze this policy's chain instead of the union");

  int theta = 1;
  auto* belief = app.add_subcommand("belief", "Conditional AoII distribution at a given age");
  belief->add_option("--theta", theta, "Age of the newest delivered sample")->required();

  auto* kernel = app.add_subcommand("kernel-dump", "Write the full transition and cost tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  args.have_out = out_opt->count() > 0;
  args.have_seed = seed_opt->count() > 0;
  args.have_threads = threads_opt->count() > 0;

  try {
    aoii::ExperimentConfig cfg = load_config(args);
    aoii::json summary;
    if (*solve) summary = aoii::cmd_solve(cfg, oracle);
    else if (*simulate)
      summary = aoii::cmd_simulate(
          cfg, sim_policy.empty() ? std::nullopt : std::optional<std::string>(sim_policy),
          with_trace);
    else if (*sweep) summary = aoii::cmd_sweep_n(cfg);
    else if (*compare) summary = aoii::cmd_compare(cfg);
    else if (*analyze)
      summary = aoii::cmd_analyze_chain(
          cfg, chain_policy.empty() ? std::nullopt : std::optional<std::string>(chain_policy));
    else if (*belief) summary = aoii::cmd_belief(cfg, theta);
    else if (*kernel) summary = aoii::cmd_kernel_dump(cfg);
    std::cout << summary.dump(2) << "\n";
    return 0;
  } catch (const aoii::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const aoii::SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
