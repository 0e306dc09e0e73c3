#include "wmpg/swor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "wmpg/errors.hpp"

namespace wmpg {

CategoricalDistribution::CategoricalDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) throw ConfigError("categorical distribution needs at least one action");
  double total = 0.0;
  for (double p : probabilities_) {
    if (!std::isfinite(p) || p < 0.0) throw ConfigError("probabilities must be finite and nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("probabilities must sum to 1");
}

std::size_t CategoricalDistribution::support_size() const {
  return static_cast<std::size_t>(std::count_if(probabilities_.begin(), probabilities_.end(),
                                                [](double p) { return p >= kSupportThreshold; }));
}

double CategoricalDistribution::entropy() const {
  double h = 0.0;
  for (double p : probabilities_)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

namespace {

void check_k(const CategoricalDistribution& dist, std::size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k > dist.size()) throw ConfigError("k exceeds the number of actions");
  if (k > dist.support_size())
    throw SamplingError("k = " + std::to_string(k) + " exceeds the " + std::to_string(dist.support_size()) +
                        " actions with nonzero probability");
}

}  // namespace

std::vector<std::size_t> gumbel_top_k(const CategoricalDistribution& dist, std::size_t k, Rng& rng) {
  check_k(dist, k);
  const std::size_t n = dist.size();
  std::vector<double> keys(n);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t a = 0; a < n; ++a) {
    // One uniform per action keeps the stream length independent of the support.
    const double u = uniform_open(rng);
    if (!dist.in_support(a)) continue;
    keys[a] = std::log(dist[a]) - std::log(-std::log(u));
    order.push_back(a);
  }
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t x, std::size_t y) { return keys[x] > keys[y] || (keys[x] == keys[y] && x < y); });
  order.resize(k);
  return order;
}

std::vector<std::size_t> sample_sequential(const CategoricalDistribution& dist, std::size_t k, Rng& rng) {
  check_k(dist, k);
  std::vector<double> remaining(dist.probabilities().begin(), dist.probabilities().end());
  for (double& p : remaining)
    if (p < kSupportThreshold) p = 0.0;
  std::vector<std::size_t> drawn;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t a = sample_categorical(remaining, rng);
    drawn.push_back(a);
    remaining[a] = 0.0;
  }
  return drawn;
}

std::vector<double> inclusion_probabilities_exact(const CategoricalDistribution& dist, std::size_t k,
                                                  std::size_t cap) {
  const std::size_t n = dist.size();
  if (n > cap)
    throw ConfigError("exact inclusion probabilities limited to " + std::to_string(cap) +
                      " actions; use inclusion_probability_mc");
  check_k(dist, k);

  std::vector<double> p(n);
  for (std::size_t a = 0; a < n; ++a) p[a] = dist.in_support(a) ? dist[a] : 0.0;

  std::vector<double> omega(n, 0.0);
  if (k == dist.support_size()) {
    for (std::size_t a = 0; a < n; ++a) omega[a] = p[a] > 0.0 ? 1.0 : 0.0;
    return omega;
  }
  if (k == 1) return p;

  // reach[mask]: probability that the first popcount(mask) draws are exactly the set `mask`.
  // Processing masks in increasing numeric order visits every subset before its supersets.
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> reach(full, 0.0);
  reach[0] = 1.0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    const double here = reach[mask];
    if (here == 0.0) continue;
    const auto drawn = static_cast<std::size_t>(std::popcount(mask));
    if (drawn == k) {
      for (std::size_t a = 0; a < n; ++a)
        if (mask & (std::size_t{1} << a)) omega[a] += here;
      continue;
    }
    double rest = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      if (!(mask & (std::size_t{1} << a))) rest += p[a];
    for (std::size_t a = 0; a < n; ++a) {
      if ((mask & (std::size_t{1} << a)) || p[a] == 0.0) continue;
      reach[mask | (std::size_t{1} << a)] += here * p[a] / rest;
    }
  }
  return omega;
}

double inclusion_probability_exact(const CategoricalDistribution& dist, std::size_t k, std::size_t action,
                                   std::size_t cap) {
  if (action >= dist.size()) throw ConfigError("action index out of range");
  if (!dist.in_support(action)) throw ConfigError("action has zero probability");
  return inclusion_probabilities_exact(dist, k, cap)[action];
}

std::vector<double> inclusion_probability_mc(const CategoricalDistribution& dist, std::size_t k,
                                             std::size_t n_samples, Rng& rng) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  check_k(dist, k);
  std::vector<double> freq(dist.size(), 0.0);
  if (k == dist.support_size()) {
    for (std::size_t a = 0; a < dist.size(); ++a) freq[a] = dist.in_support(a) ? 1.0 : 0.0;
    return freq;
  }
  std::vector<std::size_t> counts(dist.size(), 0);
  for (std::size_t s = 0; s < n_samples; ++s)
    for (std::size_t a : gumbel_top_k(dist, k, rng)) ++counts[a];
  for (std::size_t a = 0; a < dist.size(); ++a)
    freq[a] = static_cast<double>(counts[a]) / static_cast<double>(n_samples);
  return freq;
}

SworSample sample_without_replacement(const CategoricalDistribution& dist, std::size_t k, Rng& rng,
                                      const SworOptions& options) {
  SworSample sample;
  sample.actions = gumbel_top_k(dist, k, rng);

  if (k == 1) {
    sample.inclusion_probabilities = {dist[sample.actions.front()]};
    return sample;
  }
  if (k == dist.support_size()) {
    sample.inclusion_probabilities.assign(k, 1.0);
    return sample;
  }
  const bool exact = options.mode == InclusionMode::Exact ||
                     (options.mode == InclusionMode::Auto && dist.size() <= options.exact_cap);
  const std::vector<double> omega = exact ? inclusion_probabilities_exact(dist, k, options.exact_cap)
                                          : inclusion_probability_mc(dist, k, options.mc_samples, rng);
  sample.inclusion_probabilities.reserve(k);
  for (std::size_t a : sample.actions) {
    // An estimated Omega can undershoot pi; the Horvitz-Thompson weight must not exceed 1.
    sample.inclusion_probabilities.push_back(std::max(omega[a], dist[a]));
  }
  return sample;
}

}  // namespace wmpg
