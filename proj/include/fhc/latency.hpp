#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fhc/fh_core.hpp"
#include "fhc/rng.hpp"

namespace fhc {

/// Shared-link burst model: every cell in a slot sees
///   alpha_burst * (sum of bits) / C + d_proc + eps,  eps ~ U[0, jitter_max].
struct LatencyModelConfig {
  double alpha_burst = 0.5;
  double d_proc_s = 10e-6;
  double jitter_max_s = 0.5e-6;
  std::uint64_t seed = 2;

  void validate() const;
};

std::vector<double> slot_latency(std::span<const Bits> per_cell_bits, double c_fh_bps,
                                 const LatencyModelConfig& cfg, Rng& rng);

/// Latency without the jitter term, plus `jitter_s`.
double burst_latency(Bits total_bits, double c_fh_bps, const LatencyModelConfig& cfg,
                     double jitter_s);

/// Narrow interface the environment talks to: per-cell bits in, per-cell
/// latencies out.
class LatencyModel {
 public:
  virtual ~LatencyModel() = default;
  virtual std::vector<double> latencies(std::span<const Bits> per_cell_bits) = 0;
};

class BurstLatencyModel final : public LatencyModel {
 public:
  BurstLatencyModel(LatencyModelConfig cfg, double c_fh_bps, int k_cells);
  /// Throws std::invalid_argument unless per_cell_bits has k_cells entries.
  std::vector<double> latencies(std::span<const Bits> per_cell_bits) override;

 private:
  LatencyModelConfig cfg_;
  double c_fh_bps_;
  std::size_t k_cells_;
  Rng rng_;
};

}  // namespace fhc
