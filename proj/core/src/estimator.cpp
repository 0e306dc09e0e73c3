#include "wmpg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wmpg/errors.hpp"

namespace wmpg {

std::string_view to_string(EstimatorVariant variant) {
  switch (variant) {
    case EstimatorVariant::ExactExpectation: return "exact";
    case EstimatorVariant::SingleSampleMC: return "single";
    case EstimatorVariant::HTPlain: return "ht";
    case EstimatorVariant::HTCorrectedBaseline: return "ht-corrected";
    case EstimatorVariant::HTNormalized: return "ht-normalized";
  }
  return "unknown";
}

EstimatorVariant estimator_variant_from_string(std::string_view name) {
  for (auto v : {EstimatorVariant::ExactExpectation, EstimatorVariant::SingleSampleMC, EstimatorVariant::HTPlain,
                 EstimatorVariant::HTCorrectedBaseline, EstimatorVariant::HTNormalized})
    if (to_string(v) == name) return v;
  throw ConfigError("unknown estimator variant '" + std::string(name) + "'");
}

void EstimatorConfig::validate(std::size_t action_count) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (rollouts_per_action < 1) throw ConfigError("rollouts per action must be >= 1");
  if (const auto* c = std::get_if<ConstantK>(&k_strategy)) {
    if (c->k < 1 || c->k > action_count) throw ConfigError("constant k must be in [1, |A|]");
  } else if (const auto* l = std::get_if<LinearDecreasingK>(&k_strategy)) {
    if (!(l->k_start >= l->k_end && l->k_end >= 1)) throw ConfigError("linear k needs k_start >= k_end >= 1");
    if (l->total_steps < 1) throw ConfigError("linear k needs total_steps >= 1");
  }
}

namespace {

struct Weighted {
  std::size_t action;
  double pi;
  double weight;  // pi / Omega
  double q;
};

// Validates the input and returns the sampled actions sorted by index.
std::vector<Weighted> weighted_terms(const StateGradientInput& input) {
  if (input.sample == nullptr) throw UsageError("state gradient input has no sample");
  const SworSample& sample = *input.sample;
  if (sample.k() == 0) throw UsageError("empty action sample");
  if (input.q_values.size() != sample.k()) throw ConfigError("Q vector length must equal the number of sampled actions");
  if (sample.inclusion_probabilities.size() != sample.k()) throw ConfigError("inclusion probabilities missing");
  std::vector<Weighted> terms;
  terms.reserve(sample.k());
  for (std::size_t i = 0; i < sample.k(); ++i) {
    const std::size_t a = sample.actions[i];
    if (a >= input.policy.size()) throw ConfigError("sampled action outside the policy support");
    const double omega = sample.inclusion_probabilities[i];
    if (!(omega > 0.0)) throw NumericError("inclusion probability is zero");
    const double pi = input.policy[a];
    terms.push_back({a, pi, pi / omega, input.q_values[i]});
  }
  std::sort(terms.begin(), terms.end(), [](const Weighted& x, const Weighted& y) { return x.action < y.action; });
  for (std::size_t i = 1; i < terms.size(); ++i)
    if (terms[i].action == terms[i - 1].action) throw ConfigError("duplicate action in without-replacement sample");
  return terms;
}

double require_baseline(const StateGradientInput& input) {
  if (!input.value_baseline) throw UsageError("k = 1 baseline estimators need a value-network baseline");
  return *input.value_baseline;
}

}  // namespace

std::vector<ActionCoefficient> exact_coefficients(const StateGradientInput& input) {
  const auto terms = weighted_terms(input);
  if (terms.size() != input.policy.size()) throw ConfigError("exact expectation needs every action with a Q value");
  std::vector<ActionCoefficient> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back({t.action, t.pi * t.q});
  return out;
}

std::vector<ActionCoefficient> single_sample_coefficients(const StateGradientInput& input) {
  const auto terms = weighted_terms(input);
  if (terms.size() != 1) throw ConfigError("single-sample estimator takes exactly one action");
  const double b = input.value_baseline.value_or(0.0);
  return {{terms.front().action, terms.front().q - b}};
}

std::vector<ActionCoefficient> ht_coefficients(const StateGradientInput& input) {
  const auto terms = weighted_terms(input);
  std::vector<ActionCoefficient> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back({t.action, t.weight * t.q});
  return out;
}

double swor_value_baseline(const StateGradientInput& input) {
  double v = 0.0;
  for (const auto& t : weighted_terms(input)) v += t.weight * t.q;
  return v;
}

std::vector<ActionCoefficient> corrected_baseline_coefficients(const StateGradientInput& input) {
  const auto terms = weighted_terms(input);
  if (terms.size() == 1) return {{terms.front().action, terms.front().q - require_baseline(input)}};
  double v = 0.0;
  for (const auto& t : terms) v += t.weight * t.q;
  std::vector<ActionCoefficient> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    const double c = 1.0 + t.weight - t.pi;
    out.push_back({t.action, t.weight * (c * t.q - v)});
  }
  return out;
}

std::vector<ActionCoefficient> normalized_coefficients(const StateGradientInput& input) {
  const auto terms = weighted_terms(input);
  if (terms.size() == 1) return {{terms.front().action, terms.front().q - require_baseline(input)}};
  double w_total = 0.0;
  double v = 0.0;
  for (const auto& t : terms) {
    w_total += t.weight;
    v += t.weight * t.q;
  }
  if (!(w_total > 0.0)) throw NumericError("sum of importance weights is not positive");
  std::vector<ActionCoefficient> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    const double w_i = w_total - t.weight + t.pi;
    if (!(w_i > 0.0)) throw NumericError("per-action normaliser is not positive");
    out.push_back({t.action, t.weight * (t.q / w_i - v / w_total)});
  }
  return out;
}

std::vector<ActionCoefficient> estimator_coefficients(EstimatorVariant variant, const StateGradientInput& input) {
  switch (variant) {
    case EstimatorVariant::ExactExpectation: return exact_coefficients(input);
    case EstimatorVariant::SingleSampleMC: return single_sample_coefficients(input);
    case EstimatorVariant::HTPlain: return ht_coefficients(input);
    case EstimatorVariant::HTCorrectedBaseline: return corrected_baseline_coefficients(input);
    case EstimatorVariant::HTNormalized: return normalized_coefficients(input);
  }
  throw ConfigError("unknown estimator variant");
}

std::vector<double> assemble_gradient(std::span<const ActionCoefficient> coefficients, const ScoreFunction& score) {
  std::vector<double> grad;
  for (const auto& [action, coefficient] : coefficients) {
    const std::vector<double> s = score(action);
    if (grad.empty()) grad.assign(s.size(), 0.0);
    if (s.size() != grad.size()) throw ConfigError("score vectors differ in length");
    for (std::size_t j = 0; j < s.size(); ++j) grad[j] += coefficient * s[j];
  }
  return grad;
}

std::vector<double> exact_policy_gradient(const StateGradientInput& input, const ScoreFunction& score) {
  return assemble_gradient(exact_coefficients(input), score);
}

std::vector<double> exact_policy_gradient(std::span<const double> policy, std::span<const double> q_by_action,
                                          const ScoreFunction& score) {
  if (q_by_action.size() != policy.size()) throw ConfigError("exact expectation needs one Q value per action");
  SworSample all;
  all.actions.resize(policy.size());
  std::iota(all.actions.begin(), all.actions.end(), std::size_t{0});
  all.inclusion_probabilities.assign(policy.size(), 1.0);
  StateGradientInput input{policy, &all, q_by_action, std::nullopt};
  return exact_policy_gradient(input, score);
}

std::vector<double> single_sample_gradient(const StateGradientInput& input, const ScoreFunction& score) {
  return assemble_gradient(single_sample_coefficients(input), score);
}

std::vector<double> ht_gradient(const StateGradientInput& input, const ScoreFunction& score) {
  return assemble_gradient(ht_coefficients(input), score);
}

std::vector<double> corrected_baseline_gradient(const StateGradientInput& input, const ScoreFunction& score) {
  return assemble_gradient(corrected_baseline_coefficients(input), score);
}

std::vector<double> normalized_gradient(const StateGradientInput& input, const ScoreFunction& score) {
  return assemble_gradient(normalized_coefficients(input), score);
}

std::vector<double> estimate_gradient(EstimatorVariant variant, const StateGradientInput& input,
                                      const ScoreFunction& score) {
  return assemble_gradient(estimator_coefficients(variant, input), score);
}

std::size_t choose_k(const KStrategy& strategy, double policy_entropy, std::size_t action_count,
                     std::uint64_t global_step) {
  if (action_count < 1) throw ConfigError("action count must be >= 1");
  const auto clamp_k = [&](double k) {
    return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(action_count)));
  };
  if (const auto* c = std::get_if<ConstantK>(&strategy)) return std::clamp<std::size_t>(c->k, 1, action_count);
  if (const auto* l = std::get_if<LinearDecreasingK>(&strategy)) {
    const double frac = std::min(1.0, static_cast<double>(global_step) / static_cast<double>(l->total_steps));
    const double k = static_cast<double>(l->k_start) +
                     (static_cast<double>(l->k_end) - static_cast<double>(l->k_start)) * frac;
    return clamp_k(std::round(k));
  }
  if (action_count == 1) return 1;
  const double max_entropy = std::log(static_cast<double>(action_count));
  const double ratio = std::clamp(policy_entropy / max_entropy, 0.0, 1.0);
  // Guard against ln|A| round-off pushing a uniform policy just above |A|.
  const double scaled = static_cast<double>(action_count) * ratio;
  return clamp_k(std::ceil(scaled - 1e-9));
}

std::vector<double> batch_gradient(std::span<const std::vector<double>> per_state) {
  if (per_state.empty()) throw UsageError("batch gradient of an empty batch");
  const std::size_t n = per_state.front().size();
  std::vector<double> mean(n, 0.0);
  for (const auto& g : per_state) {
    if (g.size() != n) throw ConfigError("per-state gradients differ in length");
    for (std::size_t j = 0; j < n; ++j) mean[j] += g[j];
  }
  const double scale = 1.0 / static_cast<double>(per_state.size());
  for (double& m : mean) m *= scale;
  return mean;
}

}  // namespace wmpg
