#include "wmpg/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wmpg/errors.hpp"
#include "wmpg/swor.hpp"
#include "wmpg/td.hpp"

namespace wmpg {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::WMPG: return "wmpg";
    case AgentKind::AC: return "ac";
    case AgentKind::MAC: return "mac";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(std::string_view name) {
  if (name == "wmpg") return AgentKind::WMPG;
  if (name == "ac") return AgentKind::AC;
  if (name == "mac") return AgentKind::MAC;
  throw ConfigError("unknown agent kind '" + std::string(name) + "'");
}

AgentConfig AgentConfig::ac_cartpole() {
  AgentConfig c;
  c.kind = AgentKind::AC;
  c.batch_size = 32;
  c.policy_iterations = 1;
  c.value_iterations = 1;
  c.world_model_iterations = 0;
  c.estimator.variant = EstimatorVariant::SingleSampleMC;
  c.estimator.k_strategy = ConstantK{1};
  c.estimator.gamma = 0.99;
  c.policy = {{32}, Activation::ReLU, {OptimizerKind::RMSProp, 0.0025}};
  c.value = {{64}, Activation::ReLU, {OptimizerKind::RMSProp, 0.005}};
  c.transition = {{64}, Activation::ReLU, {OptimizerKind::Adam, 0.005}};
  c.reward = {{64}, Activation::ReLU, {OptimizerKind::Adam, 0.005}};
  return c;
}

AgentConfig AgentConfig::wmpg_cartpole() {
  AgentConfig c = ac_cartpole();
  c.kind = AgentKind::WMPG;
  c.policy_iterations = 5;
  c.value_iterations = 3;
  c.world_model_iterations = 5;
  c.estimator.variant = EstimatorVariant::HTNormalized;
  c.estimator.k_strategy = ConstantK{2};
  c.estimator.horizon = 15;
  c.estimator.lambda = 0.75;
  return c;
}

AgentConfig AgentConfig::mac_cartpole() {
  AgentConfig c = ac_cartpole();
  c.kind = AgentKind::MAC;
  c.policy_iterations = 3;
  c.value_iterations = 3;
  c.estimator.variant = EstimatorVariant::ExactExpectation;
  c.estimator.k_strategy = ConstantK{2};
  c.policy = {{32}, Activation::ReLU, {OptimizerKind::RMSProp, 0.00125}};
  c.value = {{64, 64}, Activation::ReLU, {OptimizerKind::RMSProp, 0.005}};
  return c;
}

AgentConfig AgentConfig::defaults_for(AgentKind kind) {
  switch (kind) {
    case AgentKind::WMPG: return wmpg_cartpole();
    case AgentKind::AC: return ac_cartpole();
    case AgentKind::MAC: return mac_cartpole();
  }
  throw ConfigError("unknown agent kind");
}

void AgentConfig::validate(std::size_t action_count) const {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (policy_iterations < 1) throw ConfigError("policy iterations must be >= 1");
  if (world_model_capacity < 1) throw ConfigError("world-model memory capacity must be >= 1");
  if (entropy_coefficient < 0.0) throw ConfigError("entropy coefficient must be >= 0");
  if (!(world_model_init_scale > 0.0)) throw ConfigError("world-model init scale must be > 0");
  estimator.validate(action_count);
  if (kind == AgentKind::AC && estimator.variant != EstimatorVariant::SingleSampleMC)
    throw ConfigError("AC uses the single-sample estimator");
  if (kind == AgentKind::MAC && estimator.variant != EstimatorVariant::ExactExpectation)
    throw ConfigError("MAC uses the exact expectation");
}

namespace {

Network build(std::size_t in, const NetworkConfig& cfg, std::size_t out, Activation out_act) {
  return Network::mlp(in, cfg.hidden, out, cfg.activation, out_act);
}

WorldModelSettings wm_settings(const NetworkConfig& cfg) { return {cfg.hidden, cfg.activation}; }

double mean_of(double sum, std::size_t n) { return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / n; }

double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

}  // namespace

Agent::Agent(AgentConfig config, std::size_t observation_dim, std::size_t action_count)
    : config_(std::move(config)),
      observation_dim_(observation_dim),
      action_count_(action_count),
      policy_(build(observation_dim, config_.policy, action_count, Activation::Softmax)),
      value_(build(observation_dim, config_.value, config_.kind == AgentKind::MAC ? action_count : 1,
                   Activation::Identity)),
      world_model_(observation_dim, action_count, wm_settings(config_.transition), wm_settings(config_.reward)),
      policy_opt_(config_.policy.optimizer, policy_.parameter_count()),
      value_opt_(config_.value.optimizer, value_.parameter_count()),
      transition_opt_(config_.transition.optimizer, world_model_.transition_net().parameter_count()),
      reward_opt_(config_.reward.optimizer, world_model_.reward_net().parameter_count()),
      on_policy_(config_.batch_size),
      wm_memory_(config_.world_model_capacity) {
  if (observation_dim < 1 || action_count < 1) throw ConfigError("agent needs observations and actions");
  config_.validate(action_count);
  Rng init(mix_seed(config_.seed, 0));
  policy_.initialize(init);
  value_.initialize(init);
  world_model_.initialize(init, config_.world_model_init_scale);
}

const Dynamics& Agent::dynamics() const {
  return dynamics_override_ ? *dynamics_override_ : static_cast<const Dynamics&>(world_model_);
}

std::vector<double> Agent::policy_probabilities(std::span<const double> observation) const {
  return policy_.predict(observation);
}

std::size_t Agent::act(std::span<const double> observation, Rng& rng) const {
  return sample_categorical(policy_.predict(observation), rng);
}

EpisodeMetrics Agent::run_episode(Environment& env, Rng& rng) {
  if (env.observation_dim() != observation_dim_ || env.action_count() != action_count_)
    throw ConfigError("environment does not match the agent's dimensions");
  EpisodeMetrics m;
  double policy_sum = 0, value_sum = 0, transition_sum = 0, reward_sum = 0, k_sum = 0, entropy_sum = 0;
  std::size_t transition_n = 0, k_n = 0;

  std::vector<double> z = env.reset(rng);
  while (true) {
    const auto probs = policy_.predict(z);
    entropy_sum += entropy_of(probs);
    const std::size_t a = sample_categorical(probs, rng);
    StepResult step = env.step(a);
    m.episode_return += step.reward;
    ++m.steps;
    TransitionRecord rec{z, a, step.reward, step.observation, step.terminal, step.done()};
    if (auto phase = observe(std::move(rec), rng)) {
      ++m.learning_phases;
      policy_sum += phase->policy;
      value_sum += phase->value;
      if (std::isfinite(phase->transition)) {
        transition_sum += phase->transition;
        reward_sum += phase->reward;
        ++transition_n;
      }
      if (std::isfinite(phase->mean_k)) {
        k_sum += phase->mean_k;
        ++k_n;
      }
    }
    if (step.done()) break;
    z = std::move(step.observation);
  }
  m.policy_loss = mean_of(policy_sum, m.learning_phases);
  m.value_loss = mean_of(value_sum, m.learning_phases);
  m.transition_loss = mean_of(transition_sum, transition_n);
  m.reward_loss = mean_of(reward_sum, transition_n);
  m.mean_k = mean_of(k_sum, k_n);
  m.entropy = entropy_sum / static_cast<double>(m.steps);
  return m;
}

std::optional<PhaseLosses> Agent::observe(TransitionRecord record, Rng& rng) {
  if (record.state.size() != observation_dim_ || record.next_state.size() != observation_dim_)
    throw ConfigError("transition has the wrong observation dimension");
  on_policy_.push(std::move(record));
  ++global_step_;
  if (!on_policy_.ready()) return std::nullopt;
  return learning_phase(rng);
}

std::vector<double> Agent::batch_returns() const {
  const auto& records = on_policy_.records();
  std::vector<double> bootstrap(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const bool tail = i + 1 == records.size() || r.episode_end;
    if (!tail || r.terminal) continue;
    if (config_.kind == AgentKind::MAC) {
      const auto q = q_override_ ? q_override_(r.next_state) : value_.predict(r.next_state);
      const auto p = policy_.predict(r.next_state);
      bootstrap[i] = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    } else {
      bootstrap[i] = value_.predict(r.next_state).front();
    }
  }
  return discounted_returns(records, config_.estimator.gamma, bootstrap);
}

std::vector<double> Agent::value_targets() const { return batch_returns(); }

double Agent::train_value(const std::vector<double>& targets) {
  const auto& records = on_policy_.records();
  std::vector<const std::vector<double>*> inputs;
  std::vector<double> goals;
  for (std::size_t i = 0; i < records.size(); ++i) {
    inputs.push_back(&records[i].state);
    goals.push_back(targets[i]);
    if (config_.anchor_terminal_values && records[i].terminal) {
      inputs.push_back(&records[i].next_state);
      goals.push_back(0.0);
    }
  }
  std::vector<double> grad(value_.parameter_count(), 0.0);
  const double scale = 1.0 / static_cast<double>(inputs.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double diff = value_.forward(*inputs[i])[0] - goals[i];
    loss += std::abs(diff);
    const double g = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) * scale;
    value_.backward_accumulate(std::span<const double>(&g, 1), grad);
  }
  loss *= scale;
  if (!std::isfinite(loss)) throw NumericError("value phase: non-finite loss");
  value_opt_.step(value_.parameters(), grad);
  return loss;
}

double Agent::train_q(const std::vector<double>& targets) {
  const auto& records = on_policy_.records();
  std::vector<double> grad(value_.parameter_count(), 0.0);
  std::vector<double> out_grad(action_count_, 0.0);
  const double scale = 1.0 / static_cast<double>(records.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto q = value_.forward(records[i].state);
    const double diff = q[records[i].action] - targets[i];
    loss += std::abs(diff);
    std::fill(out_grad.begin(), out_grad.end(), 0.0);
    out_grad[records[i].action] = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) * scale;
    value_.backward_accumulate(out_grad, grad);
  }
  loss *= scale;
  if (!std::isfinite(loss)) throw NumericError("Q phase: non-finite loss");
  value_opt_.step(value_.parameters(), grad);
  return loss;
}

std::vector<double> Agent::state_gradient(std::size_t index, const std::vector<double>& returns, Rng& rng,
                                          double& surrogate_loss) {
  const TransitionRecord& rec = on_policy_.records()[index];
  const std::span<const double> z = rec.state;
  const auto probs_span = policy_.forward(z);
  const std::vector<double> probs(probs_span.begin(), probs_span.end());
  const CategoricalDistribution dist(probs);
  const double entropy = dist.entropy();

  const ScoreFunction score = [&](std::size_t a) {
    std::vector<double> g(action_count_, 0.0);
    g[a] = 1.0 / probs[a];
    return policy_.backward(g);
  };

  SworSample sample;
  std::vector<double> q;
  std::optional<double> baseline;
  EstimatorVariant variant = config_.estimator.variant;
  std::size_t k = 0;

  switch (config_.kind) {
    case AgentKind::AC: {
      sample.actions = {rec.action};
      sample.inclusion_probabilities = {probs[rec.action]};
      q = {returns[index]};
      baseline = value_.predict(z).front();
      k = 1;
      break;
    }
    case AgentKind::MAC: {
      const auto q_all = q_override_ ? q_override_(z) : value_.predict(z);
      sample.actions.resize(action_count_);
      std::iota(sample.actions.begin(), sample.actions.end(), std::size_t{0});
      sample.inclusion_probabilities.assign(action_count_, 1.0);
      q = q_all;
      k = action_count_;
      break;
    }
    case AgentKind::WMPG: {
      if (variant == EstimatorVariant::ExactExpectation) {
        k = dist.support_size();
      } else if (variant == EstimatorVariant::SingleSampleMC) {
        k = 1;
      } else {
        k = choose_k(config_.estimator.k_strategy, entropy, action_count_, global_step_);
      }
      k = std::min(k, dist.support_size());
      sample = sample_without_replacement(dist, k, rng);
      q = q_values_for_sample(dynamics(), policy_, value_of(value_), z, sample, config_.estimator, rng);
      baseline = value_.predict(z).front();
      if (variant == EstimatorVariant::ExactExpectation && k != action_count_)
        throw NumericError("exact expectation needs every action in the support");
      break;
    }
  }

  StateGradientInput input{probs, &sample, q, baseline};
  const auto coefficients = estimator_coefficients(variant, input);
  std::vector<double> grad = assemble_gradient(coefficients, score);

  for (const auto& c : coefficients) surrogate_loss -= c.coefficient * std::log(probs[c.action]);

  if (config_.entropy_coefficient > 0.0) {
    std::vector<double> g(action_count_, 0.0);
    for (std::size_t a = 0; a < action_count_; ++a) g[a] = probs[a] > 0.0 ? -(std::log(probs[a]) + 1.0) : 0.0;
    policy_.backward_accumulate(g, grad, config_.entropy_coefficient);
    surrogate_loss -= config_.entropy_coefficient * entropy;
  }
  diagnostics_.push_back({k, entropy});
  return grad;
}

std::vector<double> Agent::policy_gradient(Rng& rng) {
  const auto& records = on_policy_.records();
  if (records.empty()) throw UsageError("policy gradient needs a nonempty on-policy memory");
  const auto returns = config_.kind == AgentKind::AC ? batch_returns() : std::vector<double>{};
  diagnostics_.clear();
  std::vector<std::vector<double>> per_state;
  per_state.reserve(records.size());
  double surrogate = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) per_state.push_back(state_gradient(i, returns, rng, surrogate));
  return batch_gradient(per_state);
}

PhaseLosses Agent::learning_phase(Rng& rng) {
  if (on_policy_.size() == 0) throw UsageError("learning phase with an empty on-policy memory");
  PhaseLosses losses;
  wm_memory_.append(on_policy_.records());

  if (config_.kind == AgentKind::WMPG && config_.world_model_iterations > 0) {
    double t_sum = 0.0, r_sum = 0.0;
    for (std::size_t it = 0; it < config_.world_model_iterations; ++it) {
      const auto batch = wm_memory_.sample(config_.batch_size, rng);
      t_sum += world_model_.train_transition(batch, transition_opt_);
      r_sum += world_model_.train_reward(batch, reward_opt_);
    }
    losses.transition = t_sum / static_cast<double>(config_.world_model_iterations);
    losses.reward = r_sum / static_cast<double>(config_.world_model_iterations);
  }

  if (config_.value_iterations > 0) {
    const auto targets = batch_returns();
    double v_sum = 0.0;
    for (std::size_t it = 0; it < config_.value_iterations; ++it)
      v_sum += config_.kind == AgentKind::MAC ? train_q(targets) : train_value(targets);
    losses.value = v_sum / static_cast<double>(config_.value_iterations);
  }

  const auto& records = on_policy_.records();
  const auto returns = config_.kind == AgentKind::AC ? batch_returns() : std::vector<double>{};
  double policy_sum = 0.0, k_sum = 0.0, entropy_sum = 0.0;
  std::size_t k_n = 0;
  std::vector<double> step(policy_.parameter_count());
  std::vector<std::vector<double>> per_state;
  for (std::size_t it = 0; it < config_.policy_iterations; ++it) {
    diagnostics_.clear();
    per_state.clear();
    double surrogate = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) per_state.push_back(state_gradient(i, returns, rng, surrogate));
    const auto ascent = batch_gradient(per_state);
    for (std::size_t j = 0; j < ascent.size(); ++j) step[j] = -ascent[j];
    policy_opt_.step(policy_.parameters(), step);
    policy_sum += surrogate / static_cast<double>(records.size());
    for (const auto& d : diagnostics_) {
      k_sum += static_cast<double>(d.k);
      entropy_sum += d.entropy;
      ++k_n;
    }
  }
  losses.policy = policy_sum / static_cast<double>(config_.policy_iterations);
  losses.mean_k = k_sum / static_cast<double>(k_n);
  losses.entropy = entropy_sum / static_cast<double>(k_n);
  on_policy_.wipe();
  return losses;
}

}  // namespace wmpg
