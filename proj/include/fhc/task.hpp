#pragma once

#include <cstddef>
#include <vector>

namespace fhc {

struct Transition {
  std::vector<double> state;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
};

struct TaskStep {
  std::vector<double> features;
  double reward = 0.0;
  bool truncated = false;  // episode length reached; the next state still bootstraps
};

/// Continuing-task interface the DDQN learner trains against.
class Task {
 public:
  virtual ~Task() = default;
  virtual std::size_t feature_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::vector<double> reset() = 0;
  virtual TaskStep step(std::size_t action) = 0;
};

}  // namespace fhc
