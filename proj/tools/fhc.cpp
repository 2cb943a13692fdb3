// fhc: train, evaluate and sweep the fronthaul compression agent.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fhc/commands.hpp"
#include "fhc/config.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct CommonOptions {
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "INI configuration file (built-in defaults when omitted)");
  cmd->add_option("--out-dir", opts.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Run seed, overrides run.seed");
  cmd->add_option("--set", opts.overrides, "Override a config key: section.key=value (repeatable)");
}

fhc::RunConfig resolve_config(const CommonOptions& opts, std::vector<std::string>& overrides) {
  overrides = opts.overrides;
  if (opts.seed) overrides.push_back("run.seed=" + std::to_string(*opts.seed));
  return opts.config.empty() ? fhc::default_config(overrides) : fhc::load_config(opts.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fronthaul compression agent: DDQN training, evaluation and load sweeps"};
  app.require_subcommand(1);

  CommonOptions train_opts, eval_opts, sweep_opts, oracle_opts;
  auto* train_cmd = app.add_subcommand("train", "Train an agent at the configured load");
  add_common(train_cmd, train_opts);

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint, or the reference scheme without one");
  add_common(eval_cmd, eval_opts);
  std::string checkpoint;
  std::optional<std::size_t> episodes;
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint to evaluate greedily");
  eval_cmd->add_option("--episodes", episodes, "Overrides eval.episodes");

  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate one agent per mean PRB load");
  add_common(sweep_cmd, sweep_opts);
  std::optional<std::string> loads;
  sweep_cmd->add_option("--mean-prb", loads, "Comma-separated loads, overrides sweep.mean_prb");

  auto* oracle_cmd = app.add_subcommand("oracle", "Print the best static configuration per load");
  add_common(oracle_cmd, oracle_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    std::vector<std::string> overrides;
    if (*train_cmd) {
      const fhc::RunConfig cfg = resolve_config(train_opts, overrides);
      const auto result = fhc::run_train(cfg, train_opts.out_dir, overrides, &std::cerr);
      std::cout << "trained " << result.log.size() << " steps; outputs in " << train_opts.out_dir << "\n";
    } else if (*eval_cmd) {
      if (episodes) eval_opts.overrides.push_back("eval.episodes=" + std::to_string(*episodes));
      const fhc::RunConfig cfg = resolve_config(eval_opts, overrides);
      std::optional<std::filesystem::path> ckpt;
      if (!checkpoint.empty()) ckpt = checkpoint;
      const auto report = fhc::run_eval(cfg, ckpt, eval_opts.out_dir);
      const auto& s = report.summary;
      std::cout << "episodes " << s.episodes << " mean_cell_sum_util " << s.mean_cell_sum_util
                << " violation_frequency " << s.violation_frequency << "\n";
    } else if (*sweep_cmd) {
      if (loads) sweep_opts.overrides.push_back("sweep.mean_prb=" + *loads);
      const fhc::RunConfig cfg = resolve_config(sweep_opts, overrides);
      const auto rows = fhc::run_sweep(cfg, sweep_opts.out_dir, &std::cerr);
      std::cout << "swept " << rows.size() << " loads; table in "
                << (std::filesystem::path(sweep_opts.out_dir) / "sweep.csv").string() << "\n";
    } else if (*oracle_cmd) {
      const fhc::RunConfig cfg = resolve_config(oracle_opts, overrides);
      fhc::run_oracle(cfg, std::cout);
    }
  } catch (const fhc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
