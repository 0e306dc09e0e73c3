#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wmpg/estimator.hpp"
#include "wmpg/memory.hpp"
#include "wmpg/network.hpp"
#include "wmpg/random.hpp"
#include "wmpg/swor.hpp"
#include "wmpg/world_model.hpp"

namespace wmpg {

/// Fixed-horizon rollout through the dynamics. states has horizon + 1 entries (z_0 .. z_h);
/// actions and rewards have horizon entries.
struct ImaginedTrajectory {
  std::vector<LatentState> states;
  std::vector<std::size_t> actions;
  std::vector<double> rewards;

  std::size_t horizon() const { return actions.size(); }
};

using ValueFunction = std::function<double(std::span<const double>)>;

/// V(z) from a scalar-output network, evaluated without touching its cache.
ValueFunction value_of(const Network& value_net);

/**
 * Rolls z_{t+1} = T(z_t, a_t), r_t = R(z_t, a_t) for `horizon` steps starting
 * with the root action; later actions are drawn from the policy network at the
 * imagined states. Terminal states are not modelled.
 */
ImaginedTrajectory imagine(const Dynamics& dynamics, const Network& policy, std::span<const double> root_state,
                           std::size_t root_action, std::size_t horizon, Rng& rng);

/// sum_{t<n} gamma^t r_t + gamma^n V(z_n).
double td_n(const ImaginedTrajectory& trajectory, std::size_t n, const ValueFunction& value, double gamma);

/// Mixture weights over TD(1..h): (1-lambda) lambda^{n-1} for n < h and lambda^{h-1} for n = h.
std::vector<double> td_lambda_weights(double lambda, std::size_t horizon);

/// Weighted mixture of TD(1..h) with td_lambda_weights.
double td_lambda(const ImaginedTrajectory& trajectory, double lambda, std::size_t horizon, const ValueFunction& value,
                 double gamma);

/// Same mixture over precomputed n-step returns td[0] = TD(1) .. td[h-1] = TD(h).
double mix_td_returns(std::span<const double> td_returns, double lambda);

/// One TD(lambda) Q estimate per sampled root action (averaged over config.rollouts_per_action rollouts).
std::vector<double> q_values_for_sample(const Dynamics& dynamics, const Network& policy, const ValueFunction& value,
                                        std::span<const double> state, const SworSample& sample,
                                        const EstimatorConfig& config, Rng& rng);

}  // namespace wmpg
