#pragma once

// Constrained MDP over the shared fronthaul. One decision step applies a
// single +/-1 index change to one cell (round robin), then simulates a
// decision interval of slots and reports interval-mean utilization and
// interval-max latency per cell.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "fhc/fh_core.hpp"
#include "fhc/latency.hpp"
#include "fhc/task.hpp"
#include "fhc/traffic.hpp"

namespace fhc {

enum class Delta : std::uint8_t { noop, q_down, q_up, b_down, b_up, r_down, r_up };

inline constexpr std::size_t kDeltaCount = 7;
inline constexpr std::array<Delta, kDeltaCount> kAllDeltas = {
    Delta::noop, Delta::q_down, Delta::q_up, Delta::b_down,
    Delta::b_up, Delta::r_down, Delta::r_up};

std::string_view to_string(Delta d);
Delta delta_from_index(std::size_t i);
/// Q- <-> Q+, etc.; NOOP is its own inverse.
Delta inverse(Delta d);

struct CellState {
  double util = 0.0;       // mean over the decision interval
  double latency_s = 0.0;  // max over the decision interval
  CompressionIndex idx;
};

struct EnvState {
  std::vector<CellState> cells;
  std::size_t focus_cell = 0;  // cell the next action is applied to
};

struct EnvAction {
  std::size_t cell = 0;
  Delta delta = Delta::noop;
};

struct RewardConfig {
  double lambda = 1.0;
  double d = 0.999;  // 1 - delta
  double tau_max_s = 260e-6;
  double delta = 1e-3;
  double gamma = 0.95;

  void validate() const;
};

struct StepInfo {
  double mean_cell_sum_util = 0.0;
  double max_latency_s = 0.0;
  int constraint_indicator = 1;  // 1 when max latency < tau_max
  Bits delivered_payload_bits = 0;
  int slots = 0;
  int violating_slots = 0;
  std::vector<CompressionConfig> configs;
  std::vector<SlotRecord> records;  // slots x cells, slot-major
};

struct StepResult {
  EnvState state;
  double reward = 0.0;
  StepInfo info;
};

/// Moves the targeted index by one step; leaving the set is a silent no-op.
EnvState apply_action(const EnvState& state, const EnvAction& action, const ConfigSets& sets);

/// sum_k util_k + lambda * (1(max_latency < tau_max) - d).
double compute_reward(std::span<const double> cell_utils, double max_latency_s,
                      const RewardConfig& cfg);

/// Feature vector of length 5K. Cell blocks are rotated so that block 0 is
/// the focus cell, block 1 the next one in round-robin order, and so on.
/// Each block is
///   [K * util clipped to [0, 1.5], min(latency / tau_max, 2),
///    q_idx / (|Q| - 1), b_idx / (|B| - 1), r_idx / (|R| - 1)]
/// with a zero index feature for single-element sets.
std::vector<double> encode_state(const EnvState& state, const ConfigSets& sets, double tau_max_s);

inline constexpr std::size_t kFeaturesPerCell = 5;

/// Full-load configuration that keeps the aggregate rate within capacity.
CompressionConfig reference_policy(const SystemConfig& sys, const ConfigSets& sets);

struct EnvConfig {
  SystemConfig system;
  ConfigSets sets;
  TrafficConfig traffic;
  LatencyModelConfig latency;
  RewardConfig reward;
  int decision_interval = 10;  // slots per decision step
  int episode_length = 200;    // decision steps before truncation

  void validate() const;
};

class FronthaulEnv {
 public:
  explicit FronthaulEnv(EnvConfig cfg);
  FronthaulEnv(EnvConfig cfg, std::unique_ptr<LatencyModel> latency);

  /// Puts every cell at the most compressed corner, then observes one
  /// interval without acting.
  const EnvState& reset();
  const EnvState& reset(std::span<const CompressionIndex> start);

  /// Applies `delta` to the focus cell, simulates one decision interval.
  StepResult step(Delta delta);

  const EnvState& state() const { return state_; }
  const StepInfo& last_info() const { return info_; }
  const EnvConfig& config() const { return cfg_; }
  const FronthaulModel& model() const { return model_; }
  int steps_in_episode() const { return steps_in_episode_; }
  bool truncated() const { return steps_in_episode_ >= cfg_.episode_length; }
  std::vector<CompressionConfig> configs() const;

 private:
  void simulate_interval();

  EnvConfig cfg_;
  FronthaulModel model_;
  TrafficProcess traffic_;
  std::unique_ptr<LatencyModel> latency_;
  EnvState state_;
  StepInfo info_;
  std::int64_t slot_ = 0;
  std::size_t decision_step_ = 0;
  int steps_in_episode_ = 0;
};

/// Adapts FronthaulEnv to the learner's Task interface.
class FronthaulTask final : public Task {
 public:
  explicit FronthaulTask(EnvConfig cfg);

  std::size_t feature_dim() const override;
  std::size_t action_count() const override { return kDeltaCount; }
  std::vector<double> reset() override;
  TaskStep step(std::size_t action) override;

  FronthaulEnv& env() { return env_; }
  const FronthaulEnv& env() const { return env_; }

 private:
  FronthaulEnv env_;
};

}  // namespace fhc
