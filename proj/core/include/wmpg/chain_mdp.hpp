#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wmpg/environment.hpp"

namespace wmpg {

/// Tabular deterministic MDP; rewards are paid on the transition (s, a) -> next[s][a].
struct ChainMdpSpec {
  std::size_t state_count = 0;
  std::size_t action_count = 0;
  std::vector<std::vector<std::size_t>> next;  // [s][a]
  std::vector<std::vector<double>> reward;     // [s][a]
  std::size_t start = 0;
  std::vector<bool> terminal;  // [s]
  std::size_t max_steps = 50;

  /// Throws ConfigError if any table is not total over S x A.
  void validate() const;

  /// `states` states in a line; action 1 moves right, action 0 left (clamped at 0).
  /// Entering the right end pays 1 and terminates.
  static ChainMdpSpec default_chain(std::size_t states = 5);
};

using TabularPolicy = std::vector<std::vector<double>>;  // [s][a]
using QTable = std::vector<std::vector<double>>;         // [s][a]

/// Exact Q^pi by iterative policy evaluation; terminal states have value 0.
QTable chain_mdp_exact_q(const ChainMdpSpec& spec, const TabularPolicy& policy, double gamma,
                         double tolerance = 1e-12, std::size_t max_iterations = 1000000);

/// Observation is the one-hot encoding of the state index.
class ChainMdpEnv final : public Environment {
 public:
  explicit ChainMdpEnv(ChainMdpSpec spec);

  std::size_t observation_dim() const override { return spec_.state_count; }
  std::size_t action_count() const override { return spec_.action_count; }
  std::size_t max_episode_steps() const override { return spec_.max_steps; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::size_t action) override;

  const ChainMdpSpec& spec() const { return spec_; }
  std::size_t state() const { return state_; }
  std::vector<double> one_hot(std::size_t state) const;

 private:
  ChainMdpSpec spec_;
  std::size_t state_ = 0;
  std::size_t steps_ = 0;
  bool done_ = true;
};

/// Decodes a (near) one-hot observation by argmax.
std::size_t decode_one_hot(std::span<const double> observation);

}  // namespace wmpg
