#pragma once

// Fully connected Q-network with ReLU hidden layers and a linear head, its
// exact backward pass for the importance-weighted squared TD loss, and the
// optimizers that train it.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fhc/task.hpp"

namespace fhc {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MlpSpec {
  std::size_t input_dim = 15;
  std::vector<std::size_t> hidden_dims{128, 128};
  std::size_t output_dim = 7;
  std::uint64_t init_seed = 3;

  void validate() const;
  bool operator==(const MlpSpec&) const = default;
};

/// weight is (out x in), row-major, so y = W x + b.
struct DenseLayer {
  RowMatrix weight;
  Eigen::VectorXd bias;
};

using MlpGradient = std::vector<DenseLayer>;

class Mlp {
 public:
  /// Weights and biases drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with
  /// spec.init_seed.
  explicit Mlp(const MlpSpec& spec);
  static Mlp zeros(const MlpSpec& spec);

  const MlpSpec& spec() const { return spec_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  Eigen::VectorXd forward(std::span<const double> features) const;
  /// One sample per row.
  RowMatrix forward_batch(const RowMatrix& features) const;

  std::size_t parameter_count() const;
  bool same_architecture(const Mlp& other) const;

  /// Layer by layer: weight (row-major) then bias.
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);

 private:
  Mlp(const MlpSpec& spec, bool zero);

  MlpSpec spec_;
  std::vector<DenseLayer> layers_;
};

MlpGradient zero_gradient(const Mlp& net);

/// Computes J = mean_i w_i * 0.5 * (y_i - Q(s_i, a_i))^2 and, when `grad` is
/// non-null, its exact gradient with the targets held fixed. `td_errors`
/// receives y_i - Q(s_i, a_i) when non-null.
double td_loss(const Mlp& net, const RowMatrix& states, std::span<const std::size_t> actions,
               std::span<const double> targets, std::span<const double> weights,
               MlpGradient* grad, std::vector<double>* td_errors);

enum class OptimizerKind { adam, sgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Optimizer {
 public:
  Optimizer(OptimizerConfig cfg, const Mlp& net);
  void apply(Mlp& net, const MlpGradient& grad);
  std::int64_t steps() const { return steps_; }
  const OptimizerConfig& config() const { return cfg_; }

 private:
  OptimizerConfig cfg_;
  MlpGradient m_;
  MlpGradient v_;
  std::int64_t steps_ = 0;
};

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainStepResult {
  double loss = 0.0;
  std::vector<double> td_errors;  // |y_i - Q(s_i, a_i)|
};

/// One DDQN update of `net`; `target` is read only. Throws NonFiniteLoss
/// before touching parameters if the loss is not finite.
TrainStepResult train_step(Mlp& net, const Mlp& target, std::span<const Transition> batch,
                           std::span<const double> importance_weights, Optimizer& opt,
                           double gamma);

/// target <- (1 - kappa) * target + kappa * net.
void soft_update(Mlp& target, const Mlp& net, double kappa);

RowMatrix stack_states(std::span<const Transition> batch, bool next);

}  // namespace fhc
