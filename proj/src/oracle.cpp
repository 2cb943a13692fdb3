#include "fhc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace fhc {

namespace {

bool aggregate_feasible(const FronthaulModel& model, Bits total_bits,
                        const LatencyModelConfig& latency, double tau_max_s,
                        FeasibilityMode mode) {
  const auto& sys = model.system();
  if (mode == FeasibilityMode::capacity)
    return static_cast<double>(total_bits) / sys.t_slot_s <= sys.c_fh_bps;
  return burst_latency(total_bits, sys.c_fh_bps, latency, latency.jitter_max_s) < tau_max_s;
}

// Ordering for ties on utilization: higher q, lower r_w, higher b_w wins.
auto tie_key(const CompressionConfig& c) { return std::make_tuple(c.q, -c.r_w, c.b_w); }

}  // namespace

bool static_config_feasible(const FronthaulModel& model, int n_prb, const CompressionConfig& cfg,
                            const LatencyModelConfig& latency, double tau_max_s,
                            FeasibilityMode mode) {
  const Bits total = model.slot_bits(n_prb, cfg) * model.system().k_cells;
  return aggregate_feasible(model, total, latency, tau_max_s, mode);
}

std::vector<StaticChoice> feasible_static_configs(const FronthaulModel& model, int n_prb,
                                                  const LatencyModelConfig& latency,
                                                  double tau_max_s, FeasibilityMode mode) {
  const auto& sys = model.system();
  std::vector<StaticChoice> out;
  for (const auto& cfg : model.sets().enumerate()) {
    if (!static_config_feasible(model, n_prb, cfg, latency, tau_max_s, mode)) continue;
    const double rate = model.fh_rate(n_prb, cfg) * sys.k_cells;
    out.push_back({cfg, rate, rate / sys.c_fh_bps});
  }
  return out;
}

StaticChoice best_static_config(const FronthaulModel& model, int n_prb,
                                const LatencyModelConfig& latency, double tau_max_s,
                                FeasibilityMode mode) {
  const auto feasible = feasible_static_configs(model, n_prb, latency, tau_max_s, mode);
  if (feasible.empty())
    throw std::runtime_error("no feasible static configuration at n_prb=" + std::to_string(n_prb));
  // Bit totals are exact, so compare on the integer per-cell bit count.
  auto better = [&](const StaticChoice& a, const StaticChoice& b) {
    const Bits ba = model.slot_bits(n_prb, a.config);
    const Bits bb = model.slot_bits(n_prb, b.config);
    if (ba != bb) return ba > bb;
    return tie_key(a.config) > tie_key(b.config);
  };
  return *std::min_element(feasible.begin(), feasible.end(), better);
}

AsymmetricChoice best_asymmetric_config(const FronthaulModel& model, int n_prb,
                                        const LatencyModelConfig& latency, double tau_max_s,
                                        FeasibilityMode mode) {
  const auto& sys = model.system();
  if (sys.k_cells > 3) throw std::invalid_argument("asymmetric enumeration is limited to K <= 3");
  const auto all = model.sets().enumerate();
  std::vector<Bits> bits(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) bits[i] = model.slot_bits(n_prb, all[i]);

  const std::size_t k = static_cast<std::size_t>(sys.k_cells);
  std::vector<std::size_t> pick(k, 0), best;
  Bits best_bits = -1;
  // Non-decreasing index tuples cover every multiset of per-cell configs once.
  while (true) {
    Bits total = 0;
    for (std::size_t j : pick) total += bits[j];
    if (total > best_bits && aggregate_feasible(model, total, latency, tau_max_s, mode)) {
      best_bits = total;
      best = pick;
    }
    std::size_t pos = k;
    while (pos > 0 && pick[pos - 1] + 1 == all.size()) --pos;
    if (pos == 0) break;
    ++pick[pos - 1];
    for (std::size_t j = pos; j < k; ++j) pick[j] = pick[pos - 1];
  }
  if (best.empty())
    throw std::runtime_error("no feasible asymmetric assignment at n_prb=" + std::to_string(n_prb));
  AsymmetricChoice out;
  for (std::size_t j : best) out.configs.push_back(all[j]);
  out.aggregate_rate_bps = static_cast<double>(best_bits) / sys.t_slot_s;
  out.cell_sum_util = out.aggregate_rate_bps / sys.c_fh_bps;
  return out;
}

ValueIterationResult value_iteration(const FiniteMdp& mdp, double tolerance, int max_sweeps) {
  const std::size_t ns = mdp.n_states, na = mdp.n_actions;
  if (ns == 0 || na == 0) throw std::invalid_argument("MDP needs states and actions");
  if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (mdp.transition.size() != ns || mdp.reward.size() != ns)
    throw std::invalid_argument("MDP tables do not match n_states");
  for (std::size_t s = 0; s < ns; ++s) {
    if (mdp.transition[s].size() != na || mdp.reward[s].size() != na)
      throw std::invalid_argument("MDP tables do not match n_actions");
    for (std::size_t a = 0; a < na; ++a) {
      const auto& row = mdp.transition[s][a];
      if (row.size() != ns) throw std::invalid_argument("transition row has wrong length");
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) throw std::invalid_argument("transition probabilities must be non-negative");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("transition row for (s=" + std::to_string(s) +
                                    ", a=" + std::to_string(a) + ") is not stochastic");
    }
  }

  ValueIterationResult out;
  out.q.assign(ns, std::vector<double>(na, 0.0));
  std::vector<double> v(ns, 0.0);
  for (out.sweeps = 1; out.sweeps <= max_sweeps; ++out.sweeps) {
    double change = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        double next = 0.0;
        for (std::size_t s2 = 0; s2 < ns; ++s2) next += mdp.transition[s][a][s2] * v[s2];
        const double q = mdp.reward[s][a] + mdp.gamma * next;
        change = std::max(change, std::abs(q - out.q[s][a]));
        out.q[s][a] = q;
      }
    }
    for (std::size_t s = 0; s < ns; ++s)
      v[s] = *std::max_element(out.q[s].begin(), out.q[s].end());
    out.residual = change;
    if (change < tolerance) return out;
  }
  throw std::runtime_error("value iteration did not converge");
}

}  // namespace fhc
