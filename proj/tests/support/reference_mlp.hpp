#pragma once

// Plain nested-loop forward pass, written without Eigen expressions, used to
// check Mlp::forward.

#include <vector>

#include "fhc/qnet.hpp"

namespace fhc::testing {

inline std::vector<double> reference_forward(const Mlp& net, const std::vector<double>& x) {
  std::vector<double> a = x;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weight;
    std::vector<double> z(static_cast<std::size_t>(w.rows()), 0.0);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double acc = layers[l].bias[i];
      for (Eigen::Index j = 0; j < w.cols(); ++j) acc += w.data()[i * w.cols() + j] * a[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = (l + 1 < layers.size() && acc < 0.0) ? 0.0 : acc;
    }
    a = std::move(z);
  }
  return a;
}

}  // namespace fhc::testing
