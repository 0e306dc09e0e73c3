#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wmpg/environment.hpp"
#include "wmpg/estimator.hpp"
#include "wmpg/memory.hpp"
#include "wmpg/network.hpp"
#include "wmpg/optimizer.hpp"
#include "wmpg/random.hpp"
#include "wmpg/world_model.hpp"

namespace wmpg {

enum class AgentKind { WMPG, AC, MAC };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view name);

struct NetworkConfig {
  std::vector<std::size_t> hidden;
  Activation activation = Activation::ReLU;
  OptimizerSettings optimizer;

  bool operator==(const NetworkConfig&) const = default;
};

struct AgentConfig {
  AgentKind kind = AgentKind::WMPG;
  std::size_t batch_size = 32;
  std::size_t policy_iterations = 5;       // I_G
  std::size_t value_iterations = 3;        // I_V (Q-network iterations for MAC)
  std::size_t world_model_iterations = 5;  // I_WM
  EstimatorConfig estimator;
  NetworkConfig policy;
  NetworkConfig value;  // V network for WMPG/AC, Q network for MAC
  NetworkConfig transition;
  NetworkConfig reward;
  std::size_t world_model_capacity = 10000;
  double entropy_coefficient = 0.0;
  // Multiplies the initialization range of the transition and reward output layers.
  double world_model_init_scale = 0.1;
  // Terminal next-states are regressed to a value of 0 alongside the batch returns.
  bool anchor_terminal_values = true;
  std::uint64_t seed = 1;

  /// Best CartPole settings per agent family.
  static AgentConfig wmpg_cartpole();
  static AgentConfig ac_cartpole();
  static AgentConfig mac_cartpole();
  static AgentConfig defaults_for(AgentKind kind);

  void validate(std::size_t action_count) const;
  bool operator==(const AgentConfig&) const = default;
};

struct PhaseLosses {
  double policy = 0.0;
  double value = 0.0;
  double transition = std::numeric_limits<double>::quiet_NaN();
  double reward = std::numeric_limits<double>::quiet_NaN();
  double mean_k = std::numeric_limits<double>::quiet_NaN();
  double entropy = 0.0;  // mean policy entropy over the batch states
};

struct EpisodeMetrics {
  double episode_return = 0.0;
  std::size_t steps = 0;
  std::size_t learning_phases = 0;
  // Means over the learning phases that ran during the episode; NaN when none ran.
  double policy_loss = std::numeric_limits<double>::quiet_NaN();
  double value_loss = std::numeric_limits<double>::quiet_NaN();
  double transition_loss = std::numeric_limits<double>::quiet_NaN();
  double reward_loss = std::numeric_limits<double>::quiet_NaN();
  double mean_k = std::numeric_limits<double>::quiet_NaN();
  // Mean entropy of pi(.|z) over the states acted on during the episode.
  double entropy = 0.0;
};

/// Per-state diagnostics from the most recent policy-gradient evaluation.
struct StateDiagnostics {
  std::size_t k = 0;
  double entropy = 0.0;
};

using QFunction = std::function<std::vector<double>(std::span<const double>)>;

/**
 * On-policy learner following the WMPG episode loop.
 *
 * Environment transitions go into the on-policy memory; when it holds more than
 * batch_size records it is flushed into the world-model memory and a learning
 * phase runs (I_WM world-model steps, I_V value steps, I_G policy steps), after
 * which the on-policy memory is wiped. AC and MAC reuse the same loop with their
 * own Q sources: batch Monte Carlo returns for AC, a learned Q network for MAC.
 */
class Agent {
 public:
  Agent(AgentConfig config, std::size_t observation_dim, std::size_t action_count);

  EpisodeMetrics run_episode(Environment& env, Rng& rng);

  /// Adds one transition; runs a learning phase if the on-policy memory overflowed.
  std::optional<PhaseLosses> observe(TransitionRecord record, Rng& rng);
  PhaseLosses learning_phase(Rng& rng);

  /// Ascent direction averaged over the states of the on-policy memory.
  std::vector<double> policy_gradient(Rng& rng);
  /// Discounted batch returns used as value targets for the current on-policy memory.
  std::vector<double> value_targets() const;

  std::size_t act(std::span<const double> observation, Rng& rng) const;
  std::vector<double> policy_probabilities(std::span<const double> observation) const;

  /// Replaces the learned world model in imagination (oracle experiments).
  void set_dynamics_override(std::shared_ptr<const Dynamics> dynamics) { dynamics_override_ = std::move(dynamics); }
  /// Replaces the learned Q network for MAC.
  void set_q_override(QFunction q) { q_override_ = std::move(q); }

  const AgentConfig& config() const { return config_; }
  std::size_t action_count() const { return action_count_; }
  std::size_t observation_dim() const { return observation_dim_; }
  std::uint64_t global_step() const { return global_step_; }

  Network& policy() { return policy_; }
  const Network& policy() const { return policy_; }
  Network& value() { return value_; }
  const Network& value() const { return value_; }
  WorldModel& world_model() { return world_model_; }
  const Dynamics& dynamics() const;
  const OnPolicyMemory& on_policy_memory() const { return on_policy_; }
  const WorldModelMemory& world_model_memory() const { return wm_memory_; }
  const std::vector<StateDiagnostics>& last_diagnostics() const { return diagnostics_; }

 private:
  double train_value(const std::vector<double>& targets);
  double train_q(const std::vector<double>& targets);
  std::vector<double> batch_returns() const;
  std::vector<double> state_gradient(std::size_t index, const std::vector<double>& returns, Rng& rng,
                                     double& surrogate_loss);

  AgentConfig config_;
  std::size_t observation_dim_;
  std::size_t action_count_;

  Network policy_;
  Network value_;
  WorldModel world_model_;
  Optimizer policy_opt_;
  Optimizer value_opt_;
  Optimizer transition_opt_;
  Optimizer reward_opt_;

  OnPolicyMemory on_policy_;
  WorldModelMemory wm_memory_;
  std::shared_ptr<const Dynamics> dynamics_override_;
  QFunction q_override_;

  std::uint64_t global_step_ = 0;
  std::vector<StateDiagnostics> diagnostics_;
};

}  // namespace wmpg
