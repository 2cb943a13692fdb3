#pragma once

// DDQN learner: Boltzmann behaviour policy, proportional prioritized replay,
// double-Q targets and the interleaved act/learn loop.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fhc/qnet.hpp"
#include "fhc/rng.hpp"
#include "fhc/task.hpp"

namespace fhc {

struct ExplorationSchedule {
  double temperature = 1.0;
  double decay = 0.995;  // multiplicative, once per gradient update
  double floor = 0.01;

  void validate() const;
  void anneal();
};

/// softmax(q / temperature), computed with the max logit subtracted.
std::vector<double> boltzmann_probabilities(std::span<const double> q_values, double temperature);
std::size_t select_action(std::span<const double> q_values, const ExplorationSchedule& schedule,
                          Rng& rng);
/// Lowest index among the maximal entries.
std::size_t greedy_action(std::span<const double> q_values);

/// y_i = r_i + gamma * Q_target(s'_i, argmax_a Q_net(s'_i, a)).
std::vector<double> ddqn_targets(std::span<const Transition> batch, const Mlp& net,
                                 const Mlp& target, double gamma);

/// Array-backed binary tree over a fixed number of leaves; each internal node
/// holds op(left, right).
template <typename Op>
class SegmentTree {
 public:
  explicit SegmentTree(std::size_t leaves) : n_(1) {
    while (n_ < leaves) n_ *= 2;
    nodes_.assign(2 * n_, 0.0);
  }
  void set(std::size_t i, double value) {
    std::size_t pos = i + n_;
    nodes_[pos] = value;
    for (pos /= 2; pos >= 1; pos /= 2) nodes_[pos] = Op{}(nodes_[2 * pos], nodes_[2 * pos + 1]);
  }
  double get(std::size_t i) const { return nodes_[i + n_]; }
  double root() const { return nodes_[1]; }

 protected:
  std::size_t n_;
  std::vector<double> nodes_;
};

struct MaxOp {
  double operator()(double a, double b) const { return a > b ? a : b; }
};

class SumTree : public SegmentTree<std::plus<double>> {
 public:
  using SegmentTree::SegmentTree;
  double total() const { return root(); }
  /// Leaf whose cumulative interval contains `prefix`, for 0 <= prefix < total().
  std::size_t find(double prefix) const;
};

struct ReplayConfig {
  std::size_t capacity = 100'000;
  double alpha = 0.6;       // priority exponent
  double beta_start = 0.4;  // importance exponent, annealed to beta_end
  double beta_end = 1.0;
  double priority_eps = 1e-6;

  void validate() const;
};

struct SampledBatch {
  std::vector<Transition> transitions;
  std::vector<std::size_t> indices;
  std::vector<double> weights;  // max weight in the batch is 1
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(ReplayConfig cfg);

  /// Inserts with the largest stored priority (at least priority_eps),
  /// overwriting the oldest item when full.
  void push(Transition t);

  /// Draws batch_size items independently with P(i) = p_i^alpha / sum_j p_j^alpha.
  SampledBatch sample(std::size_t batch_size, Rng& rng) const;

  /// p_i <- |td_i| + priority_eps.
  void update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return cfg_.capacity; }
  double priority(std::size_t i) const;
  double probability(std::size_t i) const;
  double beta() const { return beta_; }
  void set_beta(double beta) { beta_ = beta; }
  const Transition& at(std::size_t i) const;
  const ReplayConfig& config() const { return cfg_; }

 private:
  void set_priority(std::size_t i, double p);

  ReplayConfig cfg_;
  std::vector<Transition> items_;
  std::vector<double> priorities_;
  SumTree sum_;
  SegmentTree<MaxOp> max_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double beta_;
};

struct TrainConfig {
  double gamma = 0.95;
  std::size_t batch_size = 64;
  std::size_t warmup = 500;  // transitions stored before the first update
  std::size_t updates_per_step = 1;
  double kappa = 5e-3;  // soft target update rate
  std::size_t total_steps = 20'000;
  std::size_t eval_every = 0;  // 0 disables periodic evaluation
  std::uint64_t seed = 4;
  ReplayConfig replay;
  ExplorationSchedule exploration;
  OptimizerConfig optimizer;

  void validate() const;
};

struct TrainLogRow {
  std::size_t step = 0;
  std::size_t action = 0;
  double reward = 0.0;
  double loss = 0.0;  // mean loss of this step's updates, 0 before warmup
  double temperature = 0.0;
  double beta = 0.0;
  std::size_t updates = 0;
};

class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct TrainResult {
  Mlp online;
  Mlp target;
  std::vector<TrainLogRow> log;
};

using TrainObserver = std::function<void(const TrainLogRow&, const Mlp& online, const Mlp& target)>;

/// Runs total_steps decision steps of act / store / learn. Throws
/// TrainingAborted carrying the step on a non-finite loss.
TrainResult train(Task& task, const MlpSpec& spec, const TrainConfig& cfg,
                  const TrainObserver& observer = {});

}  // namespace fhc
