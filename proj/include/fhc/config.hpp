#pragma once

// Run configuration: a sectioned INI file covering the system, traffic,
// latency, reward, network, training, evaluation and sweep parameters.
// Keys not listed here are rejected.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhc/agent.hpp"
#include "fhc/environment.hpp"
#include "fhc/qnet.hpp"

namespace fhc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EvalNetwork { target, online };

struct EvalSettings {
  std::size_t episodes = 5;
  int episode_length = 200;
  std::size_t steady_window = 50;
  EvalNetwork network = EvalNetwork::target;
};

struct RunConfig {
  std::uint64_t seed = 1;
  EnvConfig env;
  MlpSpec net;
  TrainConfig train;
  std::size_t checkpoint_every = 0;  // 0 keeps only the final checkpoint
  EvalSettings eval;
  std::vector<double> sweep_mean_prb{50, 100, 175, 225, 273};
};

/// Every stochastic component gets its own seed derived from the run seed.
struct DerivedSeeds {
  std::uint64_t traffic = 0;
  std::uint64_t latency = 0;
  std::uint64_t init = 0;
  std::uint64_t train = 0;
  std::uint64_t eval_traffic = 0;
  std::uint64_t eval_latency = 0;
};

DerivedSeeds derive_seeds(std::uint64_t seed);

/// Writes the derived seeds and cross-module copies (gamma, PRB bound, state
/// width) into the component configs, then validates everything.
void resolve(RunConfig& cfg);

/// Environment used for evaluation: same parameters, fresh seeds, the
/// evaluation episode length.
EnvConfig evaluation_env(const RunConfig& cfg);

/// `overrides` are "section.key=value" strings applied after the file.
RunConfig parse_config(std::istream& in, const std::string& source,
                       const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
RunConfig default_config(const std::vector<std::string>& overrides = {});

/// Resolved configuration in the same INI format, loadable as a config.
/// Overrides and derived seeds are listed as comments.
std::string manifest_text(const RunConfig& cfg, const std::vector<std::string>& overrides = {});

}  // namespace fhc
