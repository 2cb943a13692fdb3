#include "fhc/qnet.hpp"

#include <cmath>
#include <random>
#include <string>

#include "fhc/agent.hpp"
#include "fhc/rng.hpp"

namespace fhc {

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw std::invalid_argument("MLP dimensions must be positive");
  for (std::size_t h : hidden_dims)
    if (h == 0) throw std::invalid_argument("MLP hidden widths must be positive");
}

Mlp::Mlp(const MlpSpec& spec) : Mlp(spec, false) {}

Mlp Mlp::zeros(const MlpSpec& spec) { return Mlp(spec, true); }

Mlp::Mlp(const MlpSpec& spec, bool zero) : spec_(spec) {
  spec_.validate();
  Rng rng(mix_seed(spec_.init_seed));
  std::size_t fan_in = spec_.input_dim;
  std::vector<std::size_t> widths = spec_.hidden_dims;
  widths.push_back(spec_.output_dim);
  for (std::size_t out : widths) {
    DenseLayer layer{RowMatrix::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(fan_in)),
                     Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out))};
    if (!zero) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = u(rng);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = u(rng);
    }
    layers_.push_back(std::move(layer));
    fan_in = out;
  }
}

Eigen::VectorXd Mlp::forward(std::span<const double> features) const {
  if (features.size() != spec_.input_dim)
    throw std::invalid_argument("feature length " + std::to_string(features.size()) +
                                " does not match input_dim " + std::to_string(spec_.input_dim));
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(features.data(),
                                                        static_cast<Eigen::Index>(features.size()));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weight * a + layers_[l].bias;
    a = (l + 1 < layers_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

RowMatrix Mlp::forward_batch(const RowMatrix& features) const {
  if (static_cast<std::size_t>(features.cols()) != spec_.input_dim)
    throw std::invalid_argument("batch width does not match input_dim");
  RowMatrix a = features;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    RowMatrix z = a * layers_[l].weight.transpose();
    z.rowwise() += layers_[l].bias.transpose();
    a = (l + 1 < layers_.size()) ? RowMatrix(z.cwiseMax(0.0)) : z;
  }
  return a;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool Mlp::same_architecture(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].weight.rows() != other.layers_[l].weight.rows() ||
        layers_[l].weight.cols() != other.layers_[l].weight.cols())
      return false;
  }
  return true;
}

std::vector<double> Mlp::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

void Mlp::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count())
    throw std::invalid_argument("parameter vector has the wrong length");
  std::size_t pos = 0;
  for (auto& l : layers_) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = values[pos++];
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = values[pos++];
  }
}

MlpGradient zero_gradient(const Mlp& net) {
  MlpGradient g;
  for (const auto& l : net.layers())
    g.push_back({RowMatrix::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  return g;
}

double td_loss(const Mlp& net, const RowMatrix& states, std::span<const std::size_t> actions,
               std::span<const double> targets, std::span<const double> weights,
               MlpGradient* grad, std::vector<double>* td_errors) {
  const auto batch = static_cast<std::size_t>(states.rows());
  if (batch == 0) throw std::invalid_argument("empty batch");
  if (actions.size() != batch || targets.size() != batch || weights.size() != batch)
    throw std::invalid_argument("batch arrays have inconsistent lengths");
  if (static_cast<std::size_t>(states.cols()) != net.spec().input_dim)
    throw std::invalid_argument("batch width does not match input_dim");

  const auto& layers = net.layers();
  const std::size_t n_layers = layers.size();
  // pre[l] holds layer l's pre-activation; act[l] its input.
  std::vector<RowMatrix> act(n_layers + 1), pre(n_layers);
  act[0] = states;
  for (std::size_t l = 0; l < n_layers; ++l) {
    pre[l] = act[l] * layers[l].weight.transpose();
    pre[l].rowwise() += layers[l].bias.transpose();
    act[l + 1] = (l + 1 < n_layers) ? RowMatrix(pre[l].cwiseMax(0.0)) : pre[l];
  }
  const RowMatrix& q = act[n_layers];

  const double inv_b = 1.0 / static_cast<double>(batch);
  RowMatrix d_out = RowMatrix::Zero(q.rows(), q.cols());
  double loss = 0.0;
  if (td_errors) td_errors->assign(batch, 0.0);
  for (std::size_t i = 0; i < batch; ++i) {
    if (actions[i] >= static_cast<std::size_t>(q.cols()))
      throw std::out_of_range("action index exceeds output_dim");
    const auto row = static_cast<Eigen::Index>(i);
    const auto col = static_cast<Eigen::Index>(actions[i]);
    const double err = targets[i] - q(row, col);
    loss += weights[i] * 0.5 * err * err;
    d_out(row, col) = -weights[i] * err * inv_b;
    if (td_errors) (*td_errors)[i] = err;
  }
  loss *= inv_b;
  if (!grad) return loss;

  if (grad->size() != n_layers) *grad = zero_gradient(net);
  RowMatrix delta = std::move(d_out);
  for (std::size_t l = n_layers; l-- > 0;) {
    (*grad)[l].weight.noalias() = delta.transpose() * act[l];
    (*grad)[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    RowMatrix back = delta * layers[l].weight;
    delta = back.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return loss;
}

Optimizer::Optimizer(OptimizerConfig cfg, const Mlp& net)
    : cfg_(cfg), m_(zero_gradient(net)), v_(zero_gradient(net)) {
  if (!(cfg_.learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
}

void Optimizer::apply(Mlp& net, const MlpGradient& grad) {
  auto& layers = net.layers();
  if (grad.size() != layers.size()) throw std::invalid_argument("gradient does not match network");
  ++steps_;
  const double lr = cfg_.learning_rate;
  if (cfg_.kind == OptimizerKind::sgd) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      layers[l].weight -= lr * grad[l].weight;
      layers[l].bias -= lr * grad[l].bias;
    }
    return;
  }
  const double b1 = cfg_.beta1, b2 = cfg_.beta2, eps = cfg_.epsilon;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, m_[l].weight, v_[l].weight, grad[l].weight);
    update(layers[l].bias, m_[l].bias, v_[l].bias, grad[l].bias);
  }
}

RowMatrix stack_states(std::span<const Transition> batch, bool next) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const std::size_t dim = (next ? batch[0].next_state : batch[0].state).size();
  RowMatrix out(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& v = next ? batch[i].next_state : batch[i].state;
    if (v.size() != dim) throw std::invalid_argument("ragged state vectors in batch");
    for (std::size_t j = 0; j < dim; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }
  return out;
}

TrainStepResult train_step(Mlp& net, const Mlp& target, std::span<const Transition> batch,
                           std::span<const double> importance_weights, Optimizer& opt,
                           double gamma) {
  if (importance_weights.size() != batch.size())
    throw std::invalid_argument("importance weights must match the batch size");
  const std::vector<double> y = ddqn_targets(batch, net, target, gamma);
  std::vector<std::size_t> actions(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) actions[i] = batch[i].action;

  MlpGradient grad;
  std::vector<double> td;
  const double loss = td_loss(net, stack_states(batch, false), actions, y, importance_weights, &grad, &td);
  if (!std::isfinite(loss)) throw NonFiniteLoss("non-finite TD loss");
  opt.apply(net, grad);

  TrainStepResult out;
  out.loss = loss;
  out.td_errors.reserve(td.size());
  for (double e : td) out.td_errors.push_back(std::abs(e));
  return out;
}

void soft_update(Mlp& target, const Mlp& net, double kappa) {
  if (!target.same_architecture(net)) throw std::invalid_argument("soft update across architectures");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in [0, 1]");
  auto& dst = target.layers();
  const auto& src = net.layers();
  for (std::size_t l = 0; l < dst.size(); ++l) {
    dst[l].weight = (1.0 - kappa) * dst[l].weight + kappa * src[l].weight;
    dst[l].bias = (1.0 - kappa) * dst[l].bias + kappa * src[l].bias;
  }
}

}  // namespace fhc
