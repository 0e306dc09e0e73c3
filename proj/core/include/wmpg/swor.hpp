#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wmpg/random.hpp"

namespace wmpg {

/// Probabilities below this are treated as outside the support.
inline constexpr double kSupportThreshold = 1e-12;

/// Largest action count for which inclusion probabilities are enumerated exactly.
inline constexpr std::size_t kExactInclusionCap = 12;

class CategoricalDistribution {
 public:
  /// Validates nonnegativity and unit mass (within 1e-9).
  explicit CategoricalDistribution(std::vector<double> probabilities);

  std::span<const double> probabilities() const { return probabilities_; }
  double operator[](std::size_t action) const { return probabilities_[action]; }
  std::size_t size() const { return probabilities_.size(); }
  /// Number of actions with probability >= kSupportThreshold.
  std::size_t support_size() const;
  bool in_support(std::size_t action) const { return probabilities_[action] >= kSupportThreshold; }
  /// Shannon entropy in nats.
  double entropy() const;

 private:
  std::vector<double> probabilities_;
};

struct SworSample {
  std::vector<std::size_t> actions;             // draw order
  std::vector<double> inclusion_probabilities;  // aligned with `actions`

  std::size_t k() const { return actions.size(); }
};

enum class InclusionMode { Auto, Exact, MonteCarlo };

struct SworOptions {
  InclusionMode mode = InclusionMode::Auto;
  std::size_t exact_cap = kExactInclusionCap;
  std::size_t mc_samples = 20000;
};

/**
 * Draws k distinct actions by Gumbel-top-k over log-probabilities and attaches
 * the inclusion probability Omega(a | pi, k) of every drawn action.
 *
 * Ties in the perturbed keys go to the lower action index. For k == 1 the
 * inclusion probability is the policy probability itself and for k equal to the
 * support size it is exactly 1; both are set directly rather than computed.
 */
SworSample sample_without_replacement(const CategoricalDistribution& dist, std::size_t k, Rng& rng,
                                      const SworOptions& options = {});

/// Reference sampler: k successive draws from the renormalised remaining mass.
std::vector<std::size_t> sample_sequential(const CategoricalDistribution& dist, std::size_t k, Rng& rng);

/// Gumbel-top-k action draw without inclusion probabilities.
std::vector<std::size_t> gumbel_top_k(const CategoricalDistribution& dist, std::size_t k, Rng& rng);

/// Exact Omega for every action (zero outside the support). Throws ConfigError above `cap` actions.
std::vector<double> inclusion_probabilities_exact(const CategoricalDistribution& dist, std::size_t k,
                                                  std::size_t cap = kExactInclusionCap);
double inclusion_probability_exact(const CategoricalDistribution& dist, std::size_t k, std::size_t action,
                                   std::size_t cap = kExactInclusionCap);

/// Empirical inclusion frequencies over `n_samples` Gumbel-top-k draws.
std::vector<double> inclusion_probability_mc(const CategoricalDistribution& dist, std::size_t k,
                                             std::size_t n_samples, Rng& rng);

}  // namespace wmpg
