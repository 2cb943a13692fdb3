#include "fhc/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fhc {

namespace {

int clamp_prbs(double x, int n_prb_max) {
  const double r = std::round(x);
  if (!(r >= 1.0)) return 1;
  if (r >= n_prb_max) return n_prb_max;
  return static_cast<int>(r);
}

}  // namespace

void TrafficConfig::validate() const {
  if (n_prb_max <= 0) throw std::invalid_argument("traffic n_prb_max must be positive");
  if (!(sigma_prb >= 0)) throw std::invalid_argument("sigma_prb must be non-negative");
  if (!(mean_prb > 0) || mean_prb > n_prb_max)
    throw std::invalid_argument("mean_prb must lie in (0, n_prb_max]");
}

int sample_prbs(Rng& rng, const TrafficConfig& cfg) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return clamp_prbs(cfg.mean_prb + cfg.sigma_prb * normal(rng), cfg.n_prb_max);
}

TrafficProcess::TrafficProcess(TrafficConfig cfg, int k_cells) : cfg_(cfg) {
  cfg_.validate();
  if (k_cells <= 0) throw std::invalid_argument("k_cells must be positive");
  streams_.reserve(k_cells);
  for (int k = 0; k < k_cells; ++k) streams_.push_back({make_stream(cfg_.seed, k), {}});
}

int TrafficProcess::draw(Stream& s) const {
  return clamp_prbs(cfg_.mean_prb + cfg_.sigma_prb * s.normal(s.rng), cfg_.n_prb_max);
}

std::vector<int> TrafficProcess::next_slot() {
  std::vector<int> out(streams_.size());
  for (std::size_t k = 0; k < streams_.size(); ++k) out[k] = draw(streams_[k]);
  return out;
}

}  // namespace fhc
