#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "wmpg/memory.hpp"
#include "wmpg/network.hpp"
#include "wmpg/optimizer.hpp"
#include "wmpg/random.hpp"

namespace wmpg {

/// Deterministic latent dynamics used for imagination.
class Dynamics {
 public:
  virtual ~Dynamics() = default;
  virtual std::size_t latent_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual LatentState next_state(std::span<const double> state, std::size_t action) const = 0;
  virtual double reward(std::span<const double> state, std::size_t action) const = 0;
};

/// Dynamics backed by plain functions; used to inject known dynamics in place of learned nets.
class OracleDynamics final : public Dynamics {
 public:
  using NextFn = std::function<LatentState(std::span<const double>, std::size_t)>;
  using RewardFn = std::function<double(std::span<const double>, std::size_t)>;

  OracleDynamics(std::size_t latent_dim, std::size_t action_count, NextFn next, RewardFn reward)
      : latent_dim_(latent_dim), action_count_(action_count), next_(std::move(next)), reward_(std::move(reward)) {}

  std::size_t latent_dim() const override { return latent_dim_; }
  std::size_t action_count() const override { return action_count_; }
  LatentState next_state(std::span<const double> state, std::size_t action) const override {
    return next_(state, action);
  }
  double reward(std::span<const double> state, std::size_t action) const override { return reward_(state, action); }

 private:
  std::size_t latent_dim_;
  std::size_t action_count_;
  NextFn next_;
  RewardFn reward_;
};

struct WorldModelSettings {
  std::vector<std::size_t> hidden = {64};
  Activation activation = Activation::ReLU;
};

/**
 * Learned transition T(z, a) -> z' and reward R(z, a) -> r networks. Both take
 * the latent state concatenated with a one-hot action encoding and are trained
 * with mean absolute error against observed transitions.
 */
class WorldModel final : public Dynamics {
 public:
  WorldModel(std::size_t latent_dim, std::size_t action_count, const WorldModelSettings& transition,
             const WorldModelSettings& reward);
  WorldModel(Network transition, Network reward, std::size_t latent_dim, std::size_t action_count);

  void initialize(Rng& rng, double output_scale = 1.0);

  std::size_t latent_dim() const override { return latent_dim_; }
  std::size_t action_count() const override { return action_count_; }
  LatentState next_state(std::span<const double> state, std::size_t action) const override;
  double reward(std::span<const double> state, std::size_t action) const override;

  /// One optimizer step on mean |T(z,a) - z'| over the batch; returns the pre-step loss.
  double train_transition(std::span<const TransitionRecord* const> batch, Optimizer& optimizer);
  /// One optimizer step on mean |R(z,a) - r| over the batch; returns the pre-step loss.
  double train_reward(std::span<const TransitionRecord* const> batch, Optimizer& optimizer);

  Network& transition_net() { return transition_; }
  Network& reward_net() { return reward_; }
  const Network& transition_net() const { return transition_; }
  const Network& reward_net() const { return reward_; }

  std::vector<double> encode(std::span<const double> state, std::size_t action) const;

  void save(std::ostream& out) const;
  static WorldModel load(std::istream& in, std::size_t latent_dim, std::size_t action_count);

 private:
  std::size_t latent_dim_;
  std::size_t action_count_;
  Network transition_;
  Network reward_;
};

/// Mean absolute error over every component; exposed for loss cross-checks.
double transition_mae(const Dynamics& model, std::span<const TransitionRecord* const> batch);
double reward_mae(const Dynamics& model, std::span<const TransitionRecord* const> batch);

}  // namespace wmpg
