#pragma once

// Ground-truth baselines: exhaustive search over static configurations and
// exact solution of small finite MDPs.

#include <vector>

#include "fhc/fh_core.hpp"
#include "fhc/latency.hpp"

namespace fhc {

enum class FeasibilityMode {
  capacity,  // aggregate rate <= C_FH
  latency,   // burst latency with worst-case jitter < tau_max
};

struct StaticChoice {
  CompressionConfig config;
  double aggregate_rate_bps = 0.0;
  double cell_sum_util = 0.0;
};

/// True when `cfg` applied to all K cells at `n_prb` is feasible.
bool static_config_feasible(const FronthaulModel& model, int n_prb, const CompressionConfig& cfg,
                            const LatencyModelConfig& latency, double tau_max_s,
                            FeasibilityMode mode);

/// Every feasible symmetric configuration, in ConfigSets::enumerate() order.
std::vector<StaticChoice> feasible_static_configs(const FronthaulModel& model, int n_prb,
                                                  const LatencyModelConfig& latency,
                                                  double tau_max_s, FeasibilityMode mode);

/// Feasible symmetric configuration with the highest cell-sum utilization.
/// Ties go to higher q, then lower r_w, then higher b_w. Throws
/// std::runtime_error when nothing is feasible.
StaticChoice best_static_config(const FronthaulModel& model, int n_prb,
                                const LatencyModelConfig& latency, double tau_max_s,
                                FeasibilityMode mode);

struct AsymmetricChoice {
  std::vector<CompressionConfig> configs;  // one per cell
  double aggregate_rate_bps = 0.0;
  double cell_sum_util = 0.0;
};

/// Per-cell enumeration over |configs|^K assignments at a common load. K <= 3.
AsymmetricChoice best_asymmetric_config(const FronthaulModel& model, int n_prb,
                                        const LatencyModelConfig& latency, double tau_max_s,
                                        FeasibilityMode mode);

/// Explicit finite MDP. transition[s][a][s'] rows must sum to one.
struct FiniteMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<std::vector<std::vector<double>>> transition;
  std::vector<std::vector<double>> reward;  // reward[s][a]
  double gamma = 0.95;
};

struct ValueIterationResult {
  std::vector<std::vector<double>> q;  // q[s][a]
  double residual = 0.0;               // sup-norm change of the last sweep
  int sweeps = 0;
};

ValueIterationResult value_iteration(const FiniteMdp& mdp, double tolerance = 1e-10,
                                     int max_sweeps = 1'000'000);

}  // namespace fhc
