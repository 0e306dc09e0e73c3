#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wmpg {

/// Estimators compared by the resampling benchmark, in column order.
enum class BenchmarkEstimator { HTPlain, HTCorrected, HTNormalized, WithReplacementMC };
inline constexpr std::size_t kBenchmarkEstimatorCount = 4;
std::string_view to_string(BenchmarkEstimator estimator);

struct EstimatorStats {
  double max_abs_z = 0.0;  // largest |bias z-score| over gradient components
  double variance = 0.0;   // sum of per-component sample variances
};

struct BenchmarkRow {
  std::size_t instance = 0;
  std::size_t action_count = 0;
  std::size_t k = 0;
  std::size_t resamples = 0;
  double true_gradient_norm = 0.0;
  std::array<EstimatorStats, kBenchmarkEstimatorCount> stats{};

  const EstimatorStats& of(BenchmarkEstimator e) const { return stats[static_cast<std::size_t>(e)]; }
};

struct BenchmarkReport {
  std::uint64_t seed = 0;
  std::vector<BenchmarkRow> rows;

  /// Every HTPlain |z| at or below `z_limit`.
  bool ht_unbiased(double z_limit = 3.0) const;
  /// Every k = |A| row has HTPlain variance exactly zero.
  bool zero_variance_endpoint() const;
  double max_ht_z() const;

  std::string to_csv() const;
  std::string to_table() const;
};

/**
 * Random instances cycle |A| through {2, 3, 4, 6}. Policies are softmaxes of
 * standard normal logits, Q values are uniform on [-5, 5] and the gradient is
 * taken with respect to the logits. For every valid k the estimators are
 * resampled `resamples` times; with-replacement MC averages k independent
 * draws and at k = 1 reuses the HTPlain draw.
 */
BenchmarkReport estimator_benchmark(std::size_t instances, std::size_t resamples, std::uint64_t seed);

}  // namespace wmpg
