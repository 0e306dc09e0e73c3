#include "wmpg/chain_mdp.hpp"

#include <algorithm>
#include <cmath>

#include "wmpg/errors.hpp"

namespace wmpg {

void ChainMdpSpec::validate() const {
  if (state_count < 1 || action_count < 1) throw ConfigError("chain MDP needs states and actions");
  if (next.size() != state_count || reward.size() != state_count || terminal.size() != state_count)
    throw ConfigError("chain MDP tables must cover every state");
  for (std::size_t s = 0; s < state_count; ++s) {
    if (next[s].size() != action_count || reward[s].size() != action_count)
      throw ConfigError("chain MDP tables must cover every action");
    for (std::size_t n : next[s])
      if (n >= state_count) throw ConfigError("chain MDP next-state out of range");
  }
  if (start >= state_count) throw ConfigError("chain MDP start state out of range");
}

ChainMdpSpec ChainMdpSpec::default_chain(std::size_t states) {
  if (states < 2) throw ConfigError("chain needs at least two states");
  ChainMdpSpec spec;
  spec.state_count = states;
  spec.action_count = 2;
  spec.next.assign(states, std::vector<std::size_t>(2));
  spec.reward.assign(states, std::vector<double>(2, 0.0));
  spec.terminal.assign(states, false);
  for (std::size_t s = 0; s < states; ++s) {
    spec.next[s][0] = s == 0 ? 0 : s - 1;
    spec.next[s][1] = std::min(s + 1, states - 1);
  }
  const std::size_t goal = states - 1;
  spec.terminal[goal] = true;
  spec.next[goal] = {goal, goal};
  spec.reward[goal - 1][1] = 1.0;
  spec.start = 0;
  spec.max_steps = 50;
  return spec;
}

QTable chain_mdp_exact_q(const ChainMdpSpec& spec, const TabularPolicy& policy, double gamma, double tolerance,
                         std::size_t max_iterations) {
  spec.validate();
  if (policy.size() != spec.state_count) throw ConfigError("policy must cover every state");
  for (const auto& row : policy) {
    if (row.size() != spec.action_count) throw ConfigError("policy must cover every action");
    double total = 0.0;
    for (double p : row) {
      if (p < 0.0) throw ConfigError("policy probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("policy rows must sum to 1");
  }

  const auto q_from = [&](const std::vector<double>& v) {
    QTable q(spec.state_count, std::vector<double>(spec.action_count, 0.0));
    for (std::size_t s = 0; s < spec.state_count; ++s) {
      if (spec.terminal[s]) continue;
      for (std::size_t a = 0; a < spec.action_count; ++a) q[s][a] = spec.reward[s][a] + gamma * v[spec.next[s][a]];
    }
    return q;
  };

  std::vector<double> v(spec.state_count, 0.0);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const QTable q = q_from(v);
    double residual = 0.0;
    std::vector<double> updated(spec.state_count, 0.0);
    for (std::size_t s = 0; s < spec.state_count; ++s) {
      if (spec.terminal[s]) continue;
      for (std::size_t a = 0; a < spec.action_count; ++a) updated[s] += policy[s][a] * q[s][a];
      residual = std::max(residual, std::abs(updated[s] - v[s]));
    }
    v.swap(updated);
    if (residual < tolerance) return q_from(v);
  }
  throw NumericError("policy evaluation did not converge within the iteration cap");
}

ChainMdpEnv::ChainMdpEnv(ChainMdpSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

std::vector<double> ChainMdpEnv::one_hot(std::size_t state) const {
  std::vector<double> obs(spec_.state_count, 0.0);
  obs[state] = 1.0;
  return obs;
}

std::vector<double> ChainMdpEnv::reset(Rng&) {
  state_ = spec_.start;
  steps_ = 0;
  done_ = spec_.terminal[state_];
  return one_hot(state_);
}

StepResult ChainMdpEnv::step(std::size_t action) {
  if (done_) throw UsageError("chain MDP step after the episode ended; call reset()");
  if (action >= spec_.action_count) throw ConfigError("chain MDP action out of range");
  StepResult out;
  out.reward = spec_.reward[state_][action];
  state_ = spec_.next[state_][action];
  ++steps_;
  out.observation = one_hot(state_);
  out.terminal = spec_.terminal[state_];
  out.truncated = !out.terminal && steps_ >= spec_.max_steps;
  done_ = out.done();
  return out;
}

std::size_t decode_one_hot(std::span<const double> observation) {
  return static_cast<std::size_t>(std::distance(observation.begin(),
                                                std::max_element(observation.begin(), observation.end())));
}

}  // namespace wmpg
