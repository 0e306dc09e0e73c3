#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "wmpg/swor.hpp"

namespace wmpg {

enum class EstimatorVariant { ExactExpectation, SingleSampleMC, HTPlain, HTCorrectedBaseline, HTNormalized };

std::string_view to_string(EstimatorVariant variant);
EstimatorVariant estimator_variant_from_string(std::string_view name);

struct ConstantK {
  std::size_t k = 1;
  bool operator==(const ConstantK&) const = default;
};
struct LinearDecreasingK {
  std::size_t k_start = 1;
  std::size_t k_end = 1;
  std::uint64_t total_steps = 1;
  bool operator==(const LinearDecreasingK&) const = default;
};
struct EntropyScaledK {
  bool operator==(const EntropyScaledK&) const = default;
};
using KStrategy = std::variant<ConstantK, LinearDecreasingK, EntropyScaledK>;

struct EstimatorConfig {
  EstimatorVariant variant = EstimatorVariant::HTNormalized;
  KStrategy k_strategy = ConstantK{2};
  double lambda = 0.75;
  std::size_t horizon = 15;
  double gamma = 0.99;
  std::size_t rollouts_per_action = 1;

  /// Throws ConfigError for out-of-range fields; `action_count` bounds constant k.
  void validate(std::size_t action_count) const;
  bool operator==(const EstimatorConfig&) const = default;
};

/// Returns d/dtheta log pi(action | s) at the state under evaluation.
using ScoreFunction = std::function<std::vector<double>(std::size_t action)>;

/**
 * Everything the per-state estimators need: pi(.|s), the without-replacement
 * sample with its inclusion probabilities, one Q estimate per sampled action
 * (aligned with sample.actions) and, for the k = 1 baseline rule, V(s).
 */
struct StateGradientInput {
  std::span<const double> policy;
  const SworSample* sample = nullptr;
  std::span<const double> q_values;
  std::optional<double> value_baseline;
};

/// Scalar multiplying d log pi(action) in the per-state gradient.
struct ActionCoefficient {
  std::size_t action = 0;
  double coefficient = 0.0;
};

// Coefficient forms of the estimators. Every list is sorted by action index;
// gradients are accumulated in that order so that results do not depend on the
// order in which the sampler returned the actions.
std::vector<ActionCoefficient> exact_coefficients(const StateGradientInput& input);
std::vector<ActionCoefficient> single_sample_coefficients(const StateGradientInput& input);
std::vector<ActionCoefficient> ht_coefficients(const StateGradientInput& input);
std::vector<ActionCoefficient> corrected_baseline_coefficients(const StateGradientInput& input);
std::vector<ActionCoefficient> normalized_coefficients(const StateGradientInput& input);
std::vector<ActionCoefficient> estimator_coefficients(EstimatorVariant variant, const StateGradientInput& input);

/// sum_i coefficient_i * score(action_i), in list order.
std::vector<double> assemble_gradient(std::span<const ActionCoefficient> coefficients, const ScoreFunction& score);

/// sum_a pi(a) Q(a) dlog pi(a). `input.sample` must cover every action.
std::vector<double> exact_policy_gradient(const StateGradientInput& input, const ScoreFunction& score);
/// Convenience form with Q indexed by action.
std::vector<double> exact_policy_gradient(std::span<const double> policy, std::span<const double> q_by_action,
                                          const ScoreFunction& score);
/// (Q - b) dlog pi(a) for a single draw; b = value_baseline or 0.
std::vector<double> single_sample_gradient(const StateGradientInput& input, const ScoreFunction& score);
/// sum_i pi/Omega Q dlog pi, the Horvitz-Thompson estimate.
std::vector<double> ht_gradient(const StateGradientInput& input, const ScoreFunction& score);
/// V(s) = sum_i pi/Omega Q.
double swor_value_baseline(const StateGradientInput& input);
/// sum_i pi/Omega (C_i Q_i - V) dlog pi with C_i = 1 + pi/Omega - pi.
std::vector<double> corrected_baseline_gradient(const StateGradientInput& input, const ScoreFunction& score);
/// sum_i pi/Omega (Q_i / W_i - V / W) dlog pi.
std::vector<double> normalized_gradient(const StateGradientInput& input, const ScoreFunction& score);
std::vector<double> estimate_gradient(EstimatorVariant variant, const StateGradientInput& input,
                                      const ScoreFunction& score);

std::size_t choose_k(const KStrategy& strategy, double policy_entropy, std::size_t action_count,
                     std::uint64_t global_step);

/// Componentwise mean of per-state gradients, reduced in list order.
std::vector<double> batch_gradient(std::span<const std::vector<double>> per_state);

}  // namespace wmpg
