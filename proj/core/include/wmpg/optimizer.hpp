#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace wmpg {

enum class OptimizerKind { RMSProp, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::RMSProp;
  double learning_rate = 1e-3;
  // Multiplicative annealing: learning_rate *= decay_rate every decay_interval steps (0 = off).
  double decay_rate = 1.0;
  std::size_t decay_interval = 0;
  double rms_decay = 0.99;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const OptimizerSettings&) const = default;
};

/// First-order minimizer holding per-parameter accumulators.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerSettings settings, std::size_t parameter_count);

  /// Descends along `gradient`. Throws NumericError on non-finite input before touching anything.
  void step(std::span<double> parameters, std::span<const double> gradient);

  const OptimizerSettings& settings() const { return settings_; }
  double learning_rate() const { return learning_rate_; }
  std::uint64_t step_count() const { return steps_; }
  std::span<const double> first_moment() const { return first_; }
  std::span<const double> second_moment() const { return second_; }

 private:
  OptimizerSettings settings_;
  double learning_rate_ = 0.0;
  std::uint64_t steps_ = 0;
  std::vector<double> first_;   // Adam only
  std::vector<double> second_;  // RMSProp square average / Adam second moment
};

}  // namespace wmpg
