#include "wmpg/estimator_benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "wmpg/errors.hpp"
#include "wmpg/estimator.hpp"
#include "wmpg/random.hpp"
#include "wmpg/swor.hpp"

namespace wmpg {

std::string_view to_string(BenchmarkEstimator estimator) {
  switch (estimator) {
    case BenchmarkEstimator::HTPlain: return "ht";
    case BenchmarkEstimator::HTCorrected: return "ht_corrected";
    case BenchmarkEstimator::HTNormalized: return "ht_normalized";
    case BenchmarkEstimator::WithReplacementMC: return "mc_with_replacement";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::size_t, 4> kActionCounts{2, 3, 4, 6};

// Welford accumulator over gradient vectors.
class RunningMoments {
 public:
  explicit RunningMoments(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  void add(std::span<const double> x) {
    ++n_;
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < mean_.size(); ++j) {
      const double d = x[j] - mean_[j];
      mean_[j] += d * inv;
      m2_[j] += d * (x[j] - mean_[j]);
    }
  }

  EstimatorStats stats(std::span<const double> truth) const {
    EstimatorStats s;
    const double n = static_cast<double>(n_);
    for (std::size_t j = 0; j < mean_.size(); ++j) {
      const double var = n_ > 1 ? m2_[j] / (n - 1.0) : 0.0;
      s.variance += var;
      const double diff = mean_[j] - truth[j];
      double z = 0.0;
      if (var > 0.0)
        z = diff / std::sqrt(var / n);
      else if (diff != 0.0)
        z = std::numeric_limits<double>::infinity();
      s.max_abs_z = std::max(s.max_abs_z, std::abs(z));
    }
    return s;
  }

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::uint64_t n_ = 0;
};

// Gradient w.r.t. the logits: sum_i c_i (e_{a_i} - pi).
void logit_gradient(std::span<const ActionCoefficient> coefficients, std::span<const double> pi,
                    std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& [a, c] : coefficients) {
    for (std::size_t j = 0; j < pi.size(); ++j) out[j] -= c * pi[j];
    out[a] += c;
  }
}

}  // namespace

BenchmarkReport estimator_benchmark(std::size_t instances, std::size_t resamples, std::uint64_t seed) {
  if (instances < 1 || resamples < 1) throw ConfigError("instances and resamples must be >= 1");
  BenchmarkReport report;
  report.seed = seed;

  for (std::size_t inst = 0; inst < instances; ++inst) {
    Rng rng(mix_seed(seed, inst));
    const std::size_t n = kActionCounts[inst % kActionCounts.size()];
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform_q(-5.0, 5.0);
    std::vector<double> logits(n);
    for (auto& l : logits) l = normal(rng);
    std::vector<double> q(n);
    for (auto& v : q) v = uniform_q(rng);
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    std::vector<double> pi(n);
    for (std::size_t a = 0; a < n; ++a) pi[a] = std::exp(logits[a] - max_logit);
    const double z = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (auto& p : pi) p /= z;
    const CategoricalDistribution dist(pi);

    double value = 0.0;
    for (std::size_t a = 0; a < n; ++a) value += pi[a] * q[a];
    std::vector<ActionCoefficient> exact(n);
    for (std::size_t a = 0; a < n; ++a) exact[a] = {a, pi[a] * q[a]};
    std::vector<double> truth(n);
    logit_gradient(exact, pi, truth);
    double truth_norm = 0.0;
    for (double g : truth) truth_norm += g * g;

    for (std::size_t k = 1; k <= n; ++k) {
      std::vector<double> omega_by_action = k == 1 ? pi : inclusion_probabilities_exact(dist, k);
      if (k == n) omega_by_action.assign(n, 1.0);

      std::vector<RunningMoments> moments(kBenchmarkEstimatorCount, RunningMoments(n));
      std::vector<double> grad(n);
      SworSample sample;
      std::vector<double> q_sampled;
      std::vector<ActionCoefficient> mc(k);

      for (std::size_t r = 0; r < resamples; ++r) {
        sample.actions = gumbel_top_k(dist, k, rng);
        sample.inclusion_probabilities.resize(k);
        q_sampled.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
          sample.inclusion_probabilities[i] = omega_by_action[sample.actions[i]];
          q_sampled[i] = q[sample.actions[i]];
        }
        const StateGradientInput input{pi, &sample, q_sampled, value};

        logit_gradient(ht_coefficients(input), pi, grad);
        moments[0].add(grad);
        logit_gradient(corrected_baseline_coefficients(input), pi, grad);
        moments[1].add(grad);
        logit_gradient(normalized_coefficients(input), pi, grad);
        moments[2].add(grad);

        if (k == 1) {
          mc[0] = {sample.actions[0], q[sample.actions[0]]};
        } else {
          for (std::size_t i = 0; i < k; ++i) {
            const std::size_t a = sample_categorical(pi, rng);
            mc[i] = {a, q[a] / static_cast<double>(k)};
          }
        }
        logit_gradient(mc, pi, grad);
        moments[3].add(grad);
      }

      BenchmarkRow row;
      row.instance = inst;
      row.action_count = n;
      row.k = k;
      row.resamples = resamples;
      row.true_gradient_norm = std::sqrt(truth_norm);
      for (std::size_t e = 0; e < kBenchmarkEstimatorCount; ++e) row.stats[e] = moments[e].stats(truth);
      report.rows.push_back(row);
    }
  }
  return report;
}

bool BenchmarkReport::ht_unbiased(double z_limit) const {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const BenchmarkRow& r) { return r.of(BenchmarkEstimator::HTPlain).max_abs_z <= z_limit; });
}

bool BenchmarkReport::zero_variance_endpoint() const {
  bool any = false;
  for (const auto& r : rows) {
    if (r.k != r.action_count) continue;
    any = true;
    if (r.of(BenchmarkEstimator::HTPlain).variance != 0.0) return false;
  }
  return any;
}

double BenchmarkReport::max_ht_z() const {
  double z = 0.0;
  for (const auto& r : rows) z = std::max(z, r.of(BenchmarkEstimator::HTPlain).max_abs_z);
  return z;
}

std::string BenchmarkReport::to_csv() const {
  std::string out = "instance,action_count,k,resamples,true_gradient_norm";
  for (std::size_t e = 0; e < kBenchmarkEstimatorCount; ++e) {
    const auto name = std::string(to_string(static_cast<BenchmarkEstimator>(e)));
    out += "," + name + "_max_abs_z," + name + "_variance";
  }
  out += ",ht_over_mc_variance\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.12g", r.instance, r.action_count, r.k, r.resamples,
                  r.true_gradient_norm);
    out += buf;
    for (const auto& s : r.stats) {
      std::snprintf(buf, sizeof buf, ",%.6g,%.12g", s.max_abs_z, s.variance);
      out += buf;
    }
    const double mc = r.of(BenchmarkEstimator::WithReplacementMC).variance;
    const double ratio = mc > 0.0 ? r.of(BenchmarkEstimator::HTPlain).variance / mc
                                  : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(buf, sizeof buf, ",%.6g\n", ratio);
    out += buf;
  }
  return out;
}

std::string BenchmarkReport::to_table() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%4s %3s %3s %9s %12s %12s %12s %12s\n", "inst", "|A|", "k", "ht |z|", "var ht",
                "var corr", "var norm", "var mc");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%4zu %3zu %3zu %9.3f %12.6g %12.6g %12.6g %12.6g\n", r.instance, r.action_count,
                  r.k, r.of(BenchmarkEstimator::HTPlain).max_abs_z, r.stats[0].variance, r.stats[1].variance,
                  r.stats[2].variance, r.stats[3].variance);
    out += buf;
  }
  return out;
}

}  // namespace wmpg
