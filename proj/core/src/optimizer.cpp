#include "wmpg/optimizer.hpp"

#include <cmath>
#include <string>

#include "wmpg/errors.hpp"

namespace wmpg {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "rmsprop";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "rmsprop" || name == "rms") return OptimizerKind::RMSProp;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

Optimizer::Optimizer(OptimizerSettings settings, std::size_t parameter_count)
    : settings_(settings), learning_rate_(settings.learning_rate) {
  if (!(settings_.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (settings_.decay_interval > 0 && !(settings_.decay_rate > 0.0 && settings_.decay_rate <= 1.0))
    throw ConfigError("learning-rate decay rate must be in (0, 1]");
  second_.assign(parameter_count, 0.0);
  if (settings_.kind == OptimizerKind::Adam) first_.assign(parameter_count, 0.0);
}

void Optimizer::step(std::span<double> parameters, std::span<const double> gradient) {
  if (gradient.size() != second_.size() || parameters.size() != second_.size())
    throw ConfigError("gradient length does not match optimizer state");
  for (double g : gradient)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient component");

  ++steps_;
  const double eps = settings_.epsilon;
  if (settings_.kind == OptimizerKind::RMSProp) {
    const double rho = settings_.rms_decay;
    for (std::size_t i = 0; i < gradient.size(); ++i) {
      const double g = gradient[i];
      second_[i] = rho * second_[i] + (1.0 - rho) * g * g;
      parameters[i] -= learning_rate_ * g / (std::sqrt(second_[i]) + eps);
    }
  } else {
    const double b1 = settings_.beta1;
    const double b2 = settings_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (std::size_t i = 0; i < gradient.size(); ++i) {
      const double g = gradient[i];
      first_[i] = b1 * first_[i] + (1.0 - b1) * g;
      second_[i] = b2 * second_[i] + (1.0 - b2) * g * g;
      const double m_hat = first_[i] / c1;
      const double v_hat = second_[i] / c2;
      parameters[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
  if (settings_.decay_interval > 0 && steps_ % settings_.decay_interval == 0)
    learning_rate_ *= settings_.decay_rate;
}

}  // namespace wmpg
