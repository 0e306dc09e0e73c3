#include "wmpg/cartpole.hpp"

#include <cmath>

#include "wmpg/chain_mdp.hpp"
#include "wmpg/errors.hpp"

namespace wmpg {

bool cartpole_out_of_bounds(const CartPoleState& s) {
  return s[0] < -cartpole::kXThreshold || s[0] > cartpole::kXThreshold || s[2] < -cartpole::kThetaThreshold ||
         s[2] > cartpole::kThetaThreshold;
}

CartPoleTransition cartpole_step(const CartPoleState& s, std::size_t action) {
  using namespace cartpole;
  if (action > 1) throw ConfigError("cart-pole action must be 0 or 1");
  const auto [x, x_dot, theta, theta_dot] = s;
  const double force = action == 1 ? kForce : -kForce;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) / (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

  CartPoleTransition out;
  out.next = {x + kTau * x_dot, x_dot + kTau * x_acc, theta + kTau * theta_dot, theta_dot + kTau * theta_acc};
  out.reward = 1.0;
  out.terminal = cartpole_out_of_bounds(out.next);
  return out;
}

std::vector<double> CartPoleEnv::reset(Rng& rng) {
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (double& v : state_) v = dist(rng);
  steps_ = 0;
  done_ = false;
  return {state_.begin(), state_.end()};
}

void CartPoleEnv::set_state(const CartPoleState& state) {
  state_ = state;
  steps_ = 0;
  done_ = cartpole_out_of_bounds(state);
}

StepResult CartPoleEnv::step(std::size_t action) {
  if (done_) throw UsageError("cart-pole step after the episode ended; call reset()");
  const auto tr = cartpole_step(state_, action);
  state_ = tr.next;
  ++steps_;
  StepResult out;
  out.observation.assign(state_.begin(), state_.end());
  out.reward = tr.reward;
  out.terminal = tr.terminal;
  out.truncated = !tr.terminal && steps_ >= max_steps_;
  done_ = out.done();
  return out;
}

std::unique_ptr<Environment> make_environment(const std::string& name) {
  if (name == "cartpole") return std::make_unique<CartPoleEnv>();
  if (name == "chain") return std::make_unique<ChainMdpEnv>(ChainMdpSpec::default_chain());
  throw ConfigError("unknown environment '" + name + "'");
}

}  // namespace wmpg
