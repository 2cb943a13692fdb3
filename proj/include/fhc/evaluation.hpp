#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fhc/environment.hpp"
#include "fhc/qnet.hpp"

namespace fhc {

/// Maps the current state and its encoded features to the next action.
using Policy = std::function<Delta(const EnvState& state, const std::vector<double>& features)>;

/// argmax_a Q(s, a), the temperature -> 0 limit of the Boltzmann policy.
Policy greedy_policy(const Mlp& net);
/// Never changes the configuration.
Policy static_policy();

struct EvalStep {
  std::size_t episode = 0;
  std::size_t step = 0;
  Delta action = Delta::noop;
  double reward = 0.0;
  StepInfo info;
};

struct EvalSummary {
  std::size_t episodes = 0;
  std::size_t decision_steps = 0;
  std::size_t slots = 0;
  double mean_cell_sum_util = 0.0;
  double steady_state_util = 0.0;  // mean over the last steady_window steps of each episode
  double violation_frequency = 0.0;           // violating slots / slots
  double interval_violation_frequency = 0.0;  // steps with indicator 0 / steps
  double mean_throughput_bps = 0.0;           // delivered payload bits per second
  double mean_reward = 0.0;
};

struct EvalReport {
  std::vector<EvalStep> steps;
  EvalSummary summary;
};

struct EvalOptions {
  std::size_t episodes = 1;
  std::size_t steady_window = 50;
  /// Applied to every cell at reset; most compressed corner when empty.
  std::optional<CompressionConfig> start;
};

EvalReport evaluate(const EnvConfig& env_cfg, const Policy& policy, const EvalOptions& opts);

}  // namespace fhc
