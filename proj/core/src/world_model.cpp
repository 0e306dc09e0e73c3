#include "wmpg/world_model.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "wmpg/errors.hpp"
#include "wmpg/serialization.hpp"

namespace wmpg {

namespace {

Network make_head(std::size_t input, const WorldModelSettings& s, std::size_t output) {
  return Network::mlp(input, s.hidden, output, s.activation, Activation::Identity);
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

WorldModel::WorldModel(std::size_t latent_dim, std::size_t action_count, const WorldModelSettings& transition,
                       const WorldModelSettings& reward)
    : latent_dim_(latent_dim),
      action_count_(action_count),
      transition_(make_head(latent_dim + action_count, transition, latent_dim)),
      reward_(make_head(latent_dim + action_count, reward, 1)) {}

WorldModel::WorldModel(Network transition, Network reward, std::size_t latent_dim, std::size_t action_count)
    : latent_dim_(latent_dim),
      action_count_(action_count),
      transition_(std::move(transition)),
      reward_(std::move(reward)) {
  if (transition_.input_width() != latent_dim + action_count || reward_.input_width() != latent_dim + action_count)
    throw ConfigError("world-model nets must take latent_dim + |A| inputs");
  if (transition_.output_width() != latent_dim) throw ConfigError("transition output must equal latent_dim");
  if (reward_.output_width() != 1) throw ConfigError("reward net must have a scalar output");
}

void WorldModel::initialize(Rng& rng, double output_scale) {
  transition_.initialize(rng, output_scale);
  reward_.initialize(rng, output_scale);
}

std::vector<double> WorldModel::encode(std::span<const double> state, std::size_t action) const {
  if (state.size() != latent_dim_) throw ConfigError("latent state has the wrong dimension");
  if (action >= action_count_) throw ConfigError("action index out of range");
  std::vector<double> x(latent_dim_ + action_count_, 0.0);
  std::copy(state.begin(), state.end(), x.begin());
  x[latent_dim_ + action] = 1.0;
  return x;
}

LatentState WorldModel::next_state(std::span<const double> state, std::size_t action) const {
  return transition_.predict(encode(state, action));
}

double WorldModel::reward(std::span<const double> state, std::size_t action) const {
  return reward_.predict(encode(state, action)).front();
}

double WorldModel::train_transition(std::span<const TransitionRecord* const> batch, Optimizer& optimizer) {
  if (batch.empty()) throw UsageError("transition training needs a nonempty batch");
  std::vector<double> grad(transition_.parameter_count(), 0.0);
  std::vector<double> out_grad(latent_dim_);
  const double scale = 1.0 / static_cast<double>(batch.size() * latent_dim_);
  double loss = 0.0;
  for (const TransitionRecord* r : batch) {
    const auto pred = transition_.forward(encode(r->state, r->action));
    for (std::size_t j = 0; j < latent_dim_; ++j) {
      const double diff = pred[j] - r->next_state[j];
      loss += std::abs(diff);
      out_grad[j] = sign(diff) * scale;
    }
    transition_.backward_accumulate(out_grad, grad);
  }
  loss *= scale;
  if (!std::isfinite(loss)) throw NumericError("transition loss is not finite");
  optimizer.step(transition_.parameters(), grad);
  return loss;
}

double WorldModel::train_reward(std::span<const TransitionRecord* const> batch, Optimizer& optimizer) {
  if (batch.empty()) throw UsageError("reward training needs a nonempty batch");
  std::vector<double> grad(reward_.parameter_count(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const TransitionRecord* r : batch) {
    const double diff = reward_.forward(encode(r->state, r->action))[0] - r->reward;
    loss += std::abs(diff);
    const double g = sign(diff) * scale;
    reward_.backward_accumulate(std::span<const double>(&g, 1), grad);
  }
  loss *= scale;
  if (!std::isfinite(loss)) throw NumericError("reward loss is not finite");
  optimizer.step(reward_.parameters(), grad);
  return loss;
}

void WorldModel::save(std::ostream& out) const {
  save_network(out, transition_);
  save_network(out, reward_);
}

WorldModel WorldModel::load(std::istream& in, std::size_t latent_dim, std::size_t action_count) {
  Network t = load_network(in);
  Network r = load_network(in);
  return WorldModel(std::move(t), std::move(r), latent_dim, action_count);
}

double transition_mae(const Dynamics& model, std::span<const TransitionRecord* const> batch) {
  if (batch.empty()) throw UsageError("empty batch");
  double total = 0.0;
  for (const TransitionRecord* r : batch) {
    const auto pred = model.next_state(r->state, r->action);
    for (std::size_t j = 0; j < pred.size(); ++j) total += std::abs(pred[j] - r->next_state[j]);
  }
  return total / static_cast<double>(batch.size() * model.latent_dim());
}

double reward_mae(const Dynamics& model, std::span<const TransitionRecord* const> batch) {
  if (batch.empty()) throw UsageError("empty batch");
  double total = 0.0;
  for (const TransitionRecord* r : batch) total += std::abs(model.reward(r->state, r->action) - r->reward);
  return total / static_cast<double>(batch.size());
}

}  // namespace wmpg
