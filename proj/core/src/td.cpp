#include "wmpg/td.hpp"

#include <cmath>
#include <string>

#include "wmpg/errors.hpp"

namespace wmpg {

ValueFunction value_of(const Network& value_net) {
  return [&value_net](std::span<const double> z) { return value_net.predict(z).front(); };
}

namespace {

void check_finite(const LatentState& z, std::size_t step) {
  for (double v : z)
    if (!std::isfinite(v)) throw NumericError("imagination produced a non-finite latent state at step " + std::to_string(step));
}

}  // namespace

ImaginedTrajectory imagine(const Dynamics& dynamics, const Network& policy, std::span<const double> root_state,
                           std::size_t root_action, std::size_t horizon, Rng& rng) {
  if (horizon < 1) throw ConfigError("imagination horizon must be >= 1");
  if (root_action >= dynamics.action_count()) throw ConfigError("root action out of range");
  ImaginedTrajectory traj;
  traj.states.reserve(horizon + 1);
  traj.actions.reserve(horizon);
  traj.rewards.reserve(horizon);
  traj.states.emplace_back(root_state.begin(), root_state.end());
  std::size_t action = root_action;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t > 0) {
      const auto probs = policy.predict(traj.states.back());
      action = sample_categorical(probs, rng);
    }
    const LatentState& z = traj.states.back();
    const double r = dynamics.reward(z, action);
    LatentState next = dynamics.next_state(z, action);
    if (!std::isfinite(r)) throw NumericError("imagination produced a non-finite reward at step " + std::to_string(t));
    check_finite(next, t + 1);
    traj.actions.push_back(action);
    traj.rewards.push_back(r);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

double td_n(const ImaginedTrajectory& trajectory, std::size_t n, const ValueFunction& value, double gamma) {
  if (n < 1 || n > trajectory.horizon())
    throw ConfigError("TD(n) needs 1 <= n <= horizon, got n = " + std::to_string(n));
  double ret = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < n; ++t) {
    ret += discount * trajectory.rewards[t];
    discount *= gamma;
  }
  return ret + discount * value(trajectory.states[n]);
}

std::vector<double> td_lambda_weights(double lambda, std::size_t horizon) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0, 1]");
  std::vector<double> w(horizon);
  double power = 1.0;  // lambda^{n-1}
  for (std::size_t n = 1; n < horizon; ++n) {
    w[n - 1] = (1.0 - lambda) * power;
    power *= lambda;
  }
  w[horizon - 1] = power;
  return w;
}

double mix_td_returns(std::span<const double> td_returns, double lambda) {
  const auto w = td_lambda_weights(lambda, td_returns.size());
  double q = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) q += w[i] * td_returns[i];
  return q;
}

double td_lambda(const ImaginedTrajectory& trajectory, double lambda, std::size_t horizon, const ValueFunction& value,
                 double gamma) {
  if (horizon < 1 || horizon > trajectory.horizon()) throw ConfigError("TD(lambda) horizon exceeds the trajectory");
  std::vector<double> returns(horizon);
  double prefix = 0.0;
  double discount = 1.0;
  for (std::size_t n = 1; n <= horizon; ++n) {
    prefix += discount * trajectory.rewards[n - 1];
    discount *= gamma;
    returns[n - 1] = prefix + discount * value(trajectory.states[n]);
  }
  return mix_td_returns(returns, lambda);
}

std::vector<double> q_values_for_sample(const Dynamics& dynamics, const Network& policy, const ValueFunction& value,
                                        std::span<const double> state, const SworSample& sample,
                                        const EstimatorConfig& config, Rng& rng) {
  std::vector<double> q;
  q.reserve(sample.k());
  for (std::size_t a : sample.actions) {
    double total = 0.0;
    for (std::size_t r = 0; r < config.rollouts_per_action; ++r) {
      const auto traj = imagine(dynamics, policy, state, a, config.horizon, rng);
      total += td_lambda(traj, config.lambda, config.horizon, value, config.gamma);
    }
    q.push_back(total / static_cast<double>(config.rollouts_per_action));
  }
  return q;
}

}  // namespace wmpg
