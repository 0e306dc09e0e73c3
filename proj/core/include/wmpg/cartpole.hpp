#pragma once

#include <array>
#include <cstddef>

#include "wmpg/environment.hpp"

namespace wmpg {

namespace cartpole {
inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kTotalMass = kCartMass + kPoleMass;
inline constexpr double kHalfLength = 0.5;
inline constexpr double kPoleMassLength = kPoleMass * kHalfLength;
inline constexpr double kForce = 10.0;
inline constexpr double kTau = 0.02;
inline constexpr double kXThreshold = 2.4;
inline constexpr double kThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
inline constexpr std::size_t kMaxSteps = 200;
}  // namespace cartpole

/// (x, x_dot, theta, theta_dot)
using CartPoleState = std::array<double, 4>;

struct CartPoleTransition {
  CartPoleState next;
  double reward = 1.0;
  bool terminal = false;  // out of bounds; the step cap is applied by CartPoleEnv
};

bool cartpole_out_of_bounds(const CartPoleState& state);

/// Explicit Euler step of the classic cart-pole equations of motion.
CartPoleTransition cartpole_step(const CartPoleState& state, std::size_t action);

class CartPoleEnv final : public Environment {
 public:
  explicit CartPoleEnv(std::size_t max_steps = cartpole::kMaxSteps) : max_steps_(max_steps) {}

  std::size_t observation_dim() const override { return 4; }
  std::size_t action_count() const override { return 2; }
  std::size_t max_episode_steps() const override { return max_steps_; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(std::size_t action) override;

  /// Places the system in an arbitrary state (testing and oracle use).
  void set_state(const CartPoleState& state);
  const CartPoleState& state() const { return state_; }
  std::size_t steps() const { return steps_; }

 private:
  std::size_t max_steps_;
  CartPoleState state_{};
  std::size_t steps_ = 0;
  bool done_ = true;
};

}  // namespace wmpg
