#include "fhc/environment.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "fhc/oracle.hpp"

namespace fhc {

std::string_view to_string(Delta d) {
  switch (d) {
    case Delta::noop: return "NOOP";
    case Delta::q_down: return "Q-";
    case Delta::q_up: return "Q+";
    case Delta::b_down: return "B-";
    case Delta::b_up: return "B+";
    case Delta::r_down: return "R-";
    case Delta::r_up: return "R+";
  }
  return "?";
}

Delta delta_from_index(std::size_t i) {
  if (i >= kDeltaCount) throw std::out_of_range("action index " + std::to_string(i) + " out of range");
  return kAllDeltas[i];
}

Delta inverse(Delta d) {
  switch (d) {
    case Delta::q_down: return Delta::q_up;
    case Delta::q_up: return Delta::q_down;
    case Delta::b_down: return Delta::b_up;
    case Delta::b_up: return Delta::b_down;
    case Delta::r_down: return Delta::r_up;
    case Delta::r_up: return Delta::r_down;
    case Delta::noop: break;
  }
  return Delta::noop;
}

void RewardConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("constraint level d must lie in [0, 1]");
  if (!(tau_max_s > 0.0)) throw std::invalid_argument("tau_max_s must be positive");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
}

EnvState apply_action(const EnvState& state, const EnvAction& action, const ConfigSets& sets) {
  if (action.cell >= state.cells.size()) throw std::out_of_range("action targets a missing cell");
  EnvState out = state;
  CompressionIndex& idx = out.cells[action.cell].idx;
  auto move = [](int& i, int step, std::size_t n) {
    const int next = i + step;
    if (next >= 0 && next < static_cast<int>(n)) i = next;
  };
  switch (action.delta) {
    case Delta::noop: break;
    case Delta::q_down: move(idx.q_idx, -1, sets.modulation().size()); break;
    case Delta::q_up: move(idx.q_idx, +1, sets.modulation().size()); break;
    case Delta::b_down: move(idx.b_idx, -1, sets.bitwidth().size()); break;
    case Delta::b_up: move(idx.b_idx, +1, sets.bitwidth().size()); break;
    case Delta::r_down: move(idx.r_idx, -1, sets.granularity().size()); break;
    case Delta::r_up: move(idx.r_idx, +1, sets.granularity().size()); break;
  }
  return out;
}

double compute_reward(std::span<const double> cell_utils, double max_latency_s,
                      const RewardConfig& cfg) {
  double sum = 0.0;
  for (double u : cell_utils) {
    if (u < 0.0) throw std::invalid_argument("utilization must be non-negative");
    sum += u;
  }
  const double indicator = max_latency_s < cfg.tau_max_s ? 1.0 : 0.0;
  return sum + cfg.lambda * (indicator - cfg.d);
}

std::vector<double> encode_state(const EnvState& state, const ConfigSets& sets, double tau_max_s) {
  const std::size_t k = state.cells.size();
  auto frac = [](int i, std::size_t n) {
    return n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
  };
  std::vector<double> out;
  out.reserve(kFeaturesPerCell * k);
  for (std::size_t j = 0; j < k; ++j) {
    const CellState& c = state.cells[(state.focus_cell + j) % k];
    out.push_back(std::clamp(static_cast<double>(k) * c.util, 0.0, 1.5));
    out.push_back(std::min(c.latency_s / tau_max_s, 2.0));
    out.push_back(frac(c.idx.q_idx, sets.modulation().size()));
    out.push_back(frac(c.idx.b_idx, sets.bitwidth().size()));
    out.push_back(frac(c.idx.r_idx, sets.granularity().size()));
  }
  return out;
}

CompressionConfig reference_policy(const SystemConfig& sys, const ConfigSets& sets) {
  const FronthaulModel model(sys, sets);
  return best_static_config(model, sys.n_prb_max, LatencyModelConfig{}, RewardConfig{}.tau_max_s,
                            FeasibilityMode::capacity)
      .config;
}

void EnvConfig::validate() const {
  system.validate();
  traffic.validate();
  latency.validate();
  reward.validate();
  if (traffic.n_prb_max != system.n_prb_max)
    throw std::invalid_argument("traffic n_prb_max must match the system n_prb_max");
  if (decision_interval <= 0) throw std::invalid_argument("decision_interval must be positive");
  if (episode_length <= 0) throw std::invalid_argument("episode_length must be positive");
}

FronthaulEnv::FronthaulEnv(EnvConfig cfg)
    : FronthaulEnv(cfg, std::make_unique<BurstLatencyModel>(cfg.latency, cfg.system.c_fh_bps,
                                                            cfg.system.k_cells)) {}

FronthaulEnv::FronthaulEnv(EnvConfig cfg, std::unique_ptr<LatencyModel> latency)
    : cfg_(std::move(cfg)),
      model_(cfg_.system, cfg_.sets),
      traffic_(cfg_.traffic, cfg_.system.k_cells),
      latency_(std::move(latency)) {
  cfg_.validate();
  if (!latency_) throw std::invalid_argument("latency model is null");
  state_.cells.resize(cfg_.system.k_cells);
  for (auto& c : state_.cells) c.idx = cfg_.sets.most_compressed();
}

const EnvState& FronthaulEnv::reset() {
  std::vector<CompressionIndex> start(state_.cells.size(), cfg_.sets.most_compressed());
  return reset(start);
}

const EnvState& FronthaulEnv::reset(std::span<const CompressionIndex> start) {
  if (start.size() != state_.cells.size())
    throw std::invalid_argument("reset needs one configuration per cell");
  for (std::size_t k = 0; k < start.size(); ++k) {
    cfg_.sets.at(start[k]);  // range check
    state_.cells[k].idx = start[k];
  }
  state_.focus_cell = 0;
  decision_step_ = 0;
  steps_in_episode_ = 0;
  simulate_interval();
  return state_;
}

std::vector<CompressionConfig> FronthaulEnv::configs() const {
  std::vector<CompressionConfig> out;
  out.reserve(state_.cells.size());
  for (const auto& c : state_.cells) out.push_back(cfg_.sets.at(c.idx));
  return out;
}

StepResult FronthaulEnv::step(Delta delta) {
  const std::size_t k = state_.cells.size();
  state_ = apply_action(state_, EnvAction{decision_step_ % k, delta}, cfg_.sets);
  ++decision_step_;
  ++steps_in_episode_;
  state_.focus_cell = decision_step_ % k;
  simulate_interval();

  std::vector<double> utils(k);
  for (std::size_t j = 0; j < k; ++j) utils[j] = state_.cells[j].util;
  StepResult out;
  out.state = state_;
  out.reward = compute_reward(utils, info_.max_latency_s, cfg_.reward);
  out.info = info_;
  return out;
}

void FronthaulEnv::simulate_interval() {
  const int k = cfg_.system.k_cells;
  const auto cfgs = configs();
  StepInfo info;
  info.configs = cfgs;
  info.slots = cfg_.decision_interval;
  info.records.reserve(static_cast<std::size_t>(cfg_.decision_interval) * k);

  std::vector<double> util_sum(k, 0.0);
  std::vector<double> lat_max(k, 0.0);
  std::vector<Bits> bits(k);
  double cell_sum_total = 0.0;
  for (int s = 0; s < cfg_.decision_interval; ++s, ++slot_) {
    const std::vector<int> prbs = traffic_.next_slot();
    const std::size_t first = info.records.size();
    for (int j = 0; j < k; ++j) {
      info.records.push_back(model_.record(static_cast<int>(slot_), j, prbs[j], cfgs[j]));
      bits[j] = info.records.back().payload_bits + info.records.back().weight_bits;
    }
    const std::vector<double> lat = latency_->latencies(bits);
    bool slot_ok = true;
    for (int j = 0; j < k; ++j) {
      SlotRecord& rec = info.records[first + j];
      rec.latency_s = lat[j];
      util_sum[j] += rec.util;
      cell_sum_total += rec.util;
      lat_max[j] = std::max(lat_max[j], lat[j]);
      info.max_latency_s = std::max(info.max_latency_s, lat[j]);
      slot_ok = slot_ok && lat[j] < cfg_.reward.tau_max_s;
    }
    if (slot_ok) {
      for (int j = 0; j < k; ++j) info.delivered_payload_bits += info.records[first + j].payload_bits;
    } else {
      ++info.violating_slots;
    }
  }
  for (int j = 0; j < k; ++j) {
    state_.cells[j].util = util_sum[j] / cfg_.decision_interval;
    state_.cells[j].latency_s = lat_max[j];
  }
  info.mean_cell_sum_util = cell_sum_total / cfg_.decision_interval;
  info.constraint_indicator = info.max_latency_s < cfg_.reward.tau_max_s ? 1 : 0;
  info_ = std::move(info);
}

FronthaulTask::FronthaulTask(EnvConfig cfg) : env_(std::move(cfg)) {}

std::size_t FronthaulTask::feature_dim() const {
  return kFeaturesPerCell * static_cast<std::size_t>(env_.config().system.k_cells);
}

std::vector<double> FronthaulTask::reset() {
  return encode_state(env_.reset(), env_.config().sets, env_.config().reward.tau_max_s);
}

TaskStep FronthaulTask::step(std::size_t action) {
  StepResult r = env_.step(delta_from_index(action));
  return {encode_state(r.state, env_.config().sets, env_.config().reward.tau_max_s), r.reward,
          env_.truncated()};
}

}  // namespace fhc
