#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "wmpg/random.hpp"

namespace wmpg {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;   // failure or absorbing state reached
  bool truncated = false;  // episode cap reached without a terminal
  bool done() const { return terminal || truncated; }
};

/// Episodic environment with a finite action set and real-vector observations.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t observation_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::size_t max_episode_steps() const = 0;
  virtual std::vector<double> reset(Rng& rng) = 0;
  /// Throws UsageError when called after the episode ended and before reset().
  virtual StepResult step(std::size_t action) = 0;
};

/// Factory by name: "cartpole" or "chain".
std::unique_ptr<Environment> make_environment(const std::string& name);

}  // namespace wmpg
