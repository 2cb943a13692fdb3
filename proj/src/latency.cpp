#include "fhc/latency.hpp"

#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace fhc {

void LatencyModelConfig::validate() const {
  if (!(alpha_burst >= 0.0 && alpha_burst <= 1.0))
    throw std::invalid_argument("alpha_burst must lie in [0, 1]");
  if (!(d_proc_s >= 0.0)) throw std::invalid_argument("d_proc_s must be non-negative");
  if (!(jitter_max_s >= 0.0)) throw std::invalid_argument("jitter_max_s must be non-negative");
}

double burst_latency(Bits total_bits, double c_fh_bps, const LatencyModelConfig& cfg,
                     double jitter_s) {
  if (!(c_fh_bps > 0)) throw std::invalid_argument("fronthaul capacity must be positive");
  return cfg.alpha_burst * static_cast<double>(total_bits) / c_fh_bps + cfg.d_proc_s + jitter_s;
}

std::vector<double> slot_latency(std::span<const Bits> per_cell_bits, double c_fh_bps,
                                 const LatencyModelConfig& cfg, Rng& rng) {
  if (per_cell_bits.empty()) throw std::invalid_argument("slot_latency needs at least one cell");
  const Bits total = std::accumulate(per_cell_bits.begin(), per_cell_bits.end(), Bits{0});
  // Always consume one draw so the stream position does not depend on the bound.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double eps = cfg.jitter_max_s * unit(rng);
  return std::vector<double>(per_cell_bits.size(), burst_latency(total, c_fh_bps, cfg, eps));
}

BurstLatencyModel::BurstLatencyModel(LatencyModelConfig cfg, double c_fh_bps, int k_cells)
    : cfg_(cfg),
      c_fh_bps_(c_fh_bps),
      k_cells_(static_cast<std::size_t>(k_cells)),
      rng_(make_stream(cfg.seed, 0)) {
  cfg_.validate();
  if (k_cells <= 0) throw std::invalid_argument("k_cells must be positive");
  if (!(c_fh_bps_ > 0)) throw std::invalid_argument("fronthaul capacity must be positive");
}

std::vector<double> BurstLatencyModel::latencies(std::span<const Bits> per_cell_bits) {
  if (per_cell_bits.size() != k_cells_)
    throw std::invalid_argument("expected " + std::to_string(k_cells_) + " cells, got " +
                                std::to_string(per_cell_bits.size()));
  return slot_latency(per_cell_bits, c_fh_bps_, cfg_, rng_);
}

}  // namespace fhc
