#include "fhc/evaluation.hpp"

#include <algorithm>

#include "fhc/agent.hpp"

namespace fhc {

Policy greedy_policy(const Mlp& net) {
  return [&net](const EnvState&, const std::vector<double>& features) {
    const Eigen::VectorXd q = net.forward(features);
    return delta_from_index(greedy_action(std::span<const double>(q.data(), q.size())));
  };
}

Policy static_policy() {
  return [](const EnvState&, const std::vector<double>&) { return Delta::noop; };
}

EvalReport evaluate(const EnvConfig& env_cfg, const Policy& policy, const EvalOptions& opts) {
  EvalReport report;
  EvalSummary& s = report.summary;
  s.episodes = opts.episodes;
  if (opts.episodes == 0) return report;

  FronthaulEnv env(env_cfg);
  const auto& sets = env_cfg.sets;
  const double tau = env_cfg.reward.tau_max_s;
  std::vector<CompressionIndex> start(env_cfg.system.k_cells,
                                      opts.start ? sets.index_of(*opts.start) : sets.most_compressed());

  double util_sum = 0.0, steady_sum = 0.0, reward_sum = 0.0;
  std::size_t steady_count = 0, violating_slots = 0, violating_steps = 0;
  Bits delivered = 0;
  for (std::size_t ep = 0; ep < opts.episodes; ++ep) {
    EnvState state = env.reset(start);
    const auto len = static_cast<std::size_t>(env_cfg.episode_length);
    for (std::size_t t = 0; t < len; ++t) {
      const Delta a = policy(state, encode_state(state, sets, tau));
      StepResult r = env.step(a);
      util_sum += r.info.mean_cell_sum_util;
      reward_sum += r.reward;
      violating_slots += static_cast<std::size_t>(r.info.violating_slots);
      violating_steps += r.info.constraint_indicator == 0 ? 1 : 0;
      delivered += r.info.delivered_payload_bits;
      s.slots += static_cast<std::size_t>(r.info.slots);
      if (t + std::min(opts.steady_window, len) >= len) {
        steady_sum += r.info.mean_cell_sum_util;
        ++steady_count;
      }
      state = r.state;
      r.info.records.clear();
      report.steps.push_back({ep, t, a, r.reward, std::move(r.info)});
    }
  }
  s.decision_steps = report.steps.size();
  const double n = static_cast<double>(s.decision_steps);
  s.mean_cell_sum_util = util_sum / n;
  s.mean_reward = reward_sum / n;
  s.steady_state_util = steady_count ? steady_sum / static_cast<double>(steady_count) : 0.0;
  s.violation_frequency = static_cast<double>(violating_slots) / static_cast<double>(s.slots);
  s.interval_violation_frequency = static_cast<double>(violating_steps) / n;
  s.mean_throughput_bps =
      static_cast<double>(delivered) / (static_cast<double>(s.slots) * env_cfg.system.t_slot_s);
  return report;
}

}  // namespace fhc
