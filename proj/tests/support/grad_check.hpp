#pragma once

// Central-difference check of td_loss gradients, parameter by parameter.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fhc/qnet.hpp"

namespace fhc::testing {

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t parameters = 0;
};

inline GradCheck check_td_gradient(const Mlp& net, const RowMatrix& states, const std::vector<std::size_t>& actions,
                                   const std::vector<double>& targets, const std::vector<double>& weights,
                                   double h = 1e-5) {
  MlpGradient grad;
  td_loss(net, states, actions, targets, weights, &grad, nullptr);
  std::vector<double> analytic;
  for (const auto& l : grad) {
    analytic.insert(analytic.end(), l.weight.data(), l.weight.data() + l.weight.size());
    analytic.insert(analytic.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  Mlp probe = net;
  std::vector<double> theta = net.flat_parameters();
  GradCheck out;
  out.parameters = theta.size();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    probe.set_flat_parameters(theta);
    const double up = td_loss(probe, states, actions, targets, weights, nullptr, nullptr);
    theta[i] = saved - h;
    probe.set_flat_parameters(theta);
    const double down = td_loss(probe, states, actions, targets, weights, nullptr, nullptr);
    theta[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
    out.max_rel_error = std::max(out.max_rel_error, std::abs(numeric - analytic[i]) / scale);
  }
  return out;
}

}  // namespace fhc::testing
