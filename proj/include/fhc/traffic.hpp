#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fhc/rng.hpp"

namespace fhc {

/// Scheduled-PRB process: per slot and cell, round(N(mean, sigma^2)) clamped
/// to [1, n_prb_max].
struct TrafficConfig {
  double mean_prb = 175.0;
  double sigma_prb = 1.0;  // standard deviation
  int n_prb_max = 273;
  std::uint64_t seed = 1;

  void validate() const;
};

int sample_prbs(Rng& rng, const TrafficConfig& cfg);

/// One independent stream per cell; stream k depends only on (seed, k).
class TrafficProcess {
 public:
  TrafficProcess(TrafficConfig cfg, int k_cells);

  /// Draws one slot: a PRB count per cell.
  std::vector<int> next_slot();

  const TrafficConfig& config() const { return cfg_; }

 private:
  struct Stream {
    Rng rng;
    std::normal_distribution<double> normal{0.0, 1.0};
  };

  int draw(Stream& s) const;

  TrafficConfig cfg_;
  std::vector<Stream> streams_;
};

}  // namespace fhc
