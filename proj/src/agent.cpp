#include "fhc/agent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace fhc {

void ExplorationSchedule::validate() const {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (!(floor > 0.0)) throw std::invalid_argument("temperature floor must be positive");
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("temperature decay must lie in (0, 1]");
}

void ExplorationSchedule::anneal() { temperature = std::max(floor, temperature * decay); }

std::vector<double> boltzmann_probabilities(std::span<const double> q_values, double temperature) {
  if (q_values.empty()) throw std::invalid_argument("no Q-values");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  const double top = *std::max_element(q_values.begin(), q_values.end());
  std::vector<double> p(q_values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    p[i] = std::exp((q_values[i] - top) / temperature);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

std::size_t select_action(std::span<const double> q_values, const ExplorationSchedule& schedule,
                          Rng& rng) {
  const std::vector<double> p = boltzmann_probabilities(q_values, schedule.temperature);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (u < p[i]) return i;
    u -= p[i];
  }
  // Rounding left u just above the last cumulative bound.
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) return i;
  return 0;
}

std::size_t greedy_action(std::span<const double> q_values) {
  if (q_values.empty()) throw std::invalid_argument("no Q-values");
  return static_cast<std::size_t>(std::max_element(q_values.begin(), q_values.end()) - q_values.begin());
}

std::vector<double> ddqn_targets(std::span<const Transition> batch, const Mlp& net,
                                 const Mlp& target, double gamma) {
  const RowMatrix next = stack_states(batch, true);
  const RowMatrix q_online = net.forward_batch(next);
  const RowMatrix q_target = target.forward_batch(next);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::Index best = 0;
    q_online.row(row).maxCoeff(&best);
    y[i] = batch[i].reward + gamma * q_target(row, best);
  }
  return y;
}

std::size_t SumTree::find(double prefix) const {
  std::size_t pos = 1;
  while (pos < n_) {
    const std::size_t left = 2 * pos;
    if (prefix < nodes_[left] || nodes_[left + 1] <= 0.0) {
      pos = left;
    } else {
      prefix -= nodes_[left];
      pos = left + 1;
    }
  }
  return pos - n_;
}

void ReplayConfig::validate() const {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("priority exponent must be non-negative");
  if (!(beta_start >= 0.0 && beta_end >= 0.0)) throw std::invalid_argument("importance exponent must be non-negative");
  if (!(priority_eps > 0.0)) throw std::invalid_argument("priority floor must be positive");
}

ReplayBuffer::ReplayBuffer(ReplayConfig cfg)
    : cfg_(cfg), sum_(cfg.capacity), max_(cfg.capacity), beta_(cfg.beta_start) {
  cfg_.validate();
  items_.resize(cfg_.capacity);
  priorities_.assign(cfg_.capacity, 0.0);
}

void ReplayBuffer::set_priority(std::size_t i, double p) {
  priorities_[i] = p;
  sum_.set(i, std::pow(p, cfg_.alpha));
  max_.set(i, p);
}

void ReplayBuffer::push(Transition t) {
  const std::size_t slot = next_;
  // The slot being overwritten must not set the insert priority.
  max_.set(slot, 0.0);
  const double p = std::max(max_.root(), cfg_.priority_eps);
  items_[slot] = std::move(t);
  set_priority(slot, p);
  next_ = (next_ + 1) % cfg_.capacity;
  size_ = std::min(size_ + 1, cfg_.capacity);
}

double ReplayBuffer::priority(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index out of range");
  return priorities_[i];
}

double ReplayBuffer::probability(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index out of range");
  return sum_.get(i) / sum_.total();
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index out of range");
  return items_[i];
}

SampledBatch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (size_ < batch_size)
    throw std::runtime_error("replay buffer holds " + std::to_string(size_) +
                             " transitions, batch needs " + std::to_string(batch_size));
  SampledBatch out;
  out.indices.reserve(batch_size);
  out.transitions.reserve(batch_size);
  out.weights.reserve(batch_size);
  const double total = sum_.total();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double max_w = 0.0;
  for (std::size_t b = 0; b < batch_size; ++b) {
    const std::size_t i = std::min(sum_.find(unit(rng) * total), size_ - 1);
    const double p = sum_.get(i) / total;
    const double w = std::pow(static_cast<double>(size_) * p, -beta_);
    max_w = std::max(max_w, w);
    out.indices.push_back(i);
    out.transitions.push_back(items_[i]);
    out.weights.push_back(w);
  }
  for (double& w : out.weights) w /= max_w;
  return out;
}

void ReplayBuffer::update_priorities(std::span<const std::size_t> indices,
                                     std::span<const double> td_errors) {
  if (indices.size() != td_errors.size())
    throw std::invalid_argument("indices and TD errors differ in length");
  for (std::size_t i : indices)
    if (i >= size_) throw std::out_of_range("replay index " + std::to_string(i) + " out of range");
  for (std::size_t j = 0; j < indices.size(); ++j)
    set_priority(indices[j], std::abs(td_errors[j]) + cfg_.priority_eps);
}

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(batch_size <= warmup && warmup <= replay.capacity))
    throw std::invalid_argument("need batch_size <= warmup <= replay capacity");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in [0, 1]");
  replay.validate();
  exploration.validate();
  if (!(optimizer.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

TrainResult train(Task& task, const MlpSpec& spec, const TrainConfig& cfg,
                  const TrainObserver& observer) {
  cfg.validate();
  if (spec.input_dim != task.feature_dim() || spec.output_dim != task.action_count())
    throw std::invalid_argument("network shape does not match the task");

  Mlp net(spec);
  Mlp target = net;
  Optimizer opt(cfg.optimizer, net);
  ReplayBuffer buffer(cfg.replay);
  ExplorationSchedule schedule = cfg.exploration;
  Rng act_rng = make_stream(cfg.seed, 0);
  Rng replay_rng = make_stream(cfg.seed, 1);

  TrainResult result{net, target, {}};
  result.log.reserve(cfg.total_steps);
  std::vector<double> state = task.reset();
  for (std::size_t step = 0; step < cfg.total_steps; ++step) {
    const double progress = cfg.total_steps > 1
                                ? static_cast<double>(step) / static_cast<double>(cfg.total_steps - 1)
                                : 1.0;
    buffer.set_beta(cfg.replay.beta_start + (cfg.replay.beta_end - cfg.replay.beta_start) * progress);

    const Eigen::VectorXd q = net.forward(state);
    const std::size_t action = select_action(std::span<const double>(q.data(), q.size()), schedule, act_rng);
    TaskStep next = task.step(action);
    buffer.push({state, action, next.reward, next.features});

    TrainLogRow row;
    row.step = step;
    row.action = action;
    row.reward = next.reward;
    if (buffer.size() >= cfg.warmup) {
      double loss_sum = 0.0;
      for (std::size_t u = 0; u < cfg.updates_per_step; ++u) {
        SampledBatch batch = buffer.sample(cfg.batch_size, replay_rng);
        TrainStepResult r;
        try {
          r = train_step(net, target, batch.transitions, batch.weights, opt, cfg.gamma);
        } catch (const NonFiniteLoss& e) {
          throw TrainingAborted(std::string(e.what()) + " at step " + std::to_string(step), step);
        }
        soft_update(target, net, cfg.kappa);
        buffer.update_priorities(batch.indices, r.td_errors);
        schedule.anneal();
        loss_sum += r.loss;
        ++row.updates;
      }
      if (row.updates > 0) row.loss = loss_sum / static_cast<double>(row.updates);
    }
    row.temperature = schedule.temperature;
    row.beta = buffer.beta();
    result.log.push_back(row);
    if (observer) observer(row, net, target);

    state = next.truncated ? task.reset() : std::move(next.features);
  }
  result.online = std::move(net);
  result.target = std::move(target);
  return result;
}

}  // namespace fhc
