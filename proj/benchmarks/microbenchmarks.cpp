#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "wmpg/estimator.hpp"
#include "wmpg/network.hpp"
#include "wmpg/swor.hpp"
#include "wmpg/td.hpp"

using namespace wmpg;

namespace {

Network policy_net(std::size_t hidden) {
  const std::vector<std::size_t> h = {hidden};
  Network net = Network::mlp(4, h, 2, Activation::ReLU, Activation::Softmax);
  Rng rng(1);
  net.initialize(rng);
  return net;
}

CategoricalDistribution random_distribution(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> p(n);
  double z = 0.0;
  for (auto& v : p) z += (v = std::exp(normal(rng)));
  for (auto& v : p) v /= z;
  return CategoricalDistribution(p);
}

}  // namespace

static void BM_NetworkForward(benchmark::State& state) {
  Network net = policy_net(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> x = {0.01, -0.2, 0.03, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x).data());
}
BENCHMARK(BM_NetworkForward)->Arg(32)->Arg(64)->Arg(256);

static void BM_NetworkBackward(benchmark::State& state) {
  Network net = policy_net(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> x = {0.01, -0.2, 0.03, 0.4};
  const std::vector<double> g = {1.0, -1.0};
  net.forward(x);
  for (auto _ : state) benchmark::DoNotOptimize(net.backward(g).data());
}
BENCHMARK(BM_NetworkBackward)->Arg(32)->Arg(64)->Arg(256);

static void BM_GumbelTopK(benchmark::State& state) {
  Rng rng(2);
  const auto dist = random_distribution(static_cast<std::size_t>(state.range(0)), rng);
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gumbel_top_k(dist, k, rng).data());
}
BENCHMARK(BM_GumbelTopK)->Args({6, 2})->Args({18, 4});

static void BM_InclusionExact(benchmark::State& state) {
  Rng rng(3);
  const auto dist = random_distribution(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(inclusion_probabilities_exact(dist, 3).data());
}
BENCHMARK(BM_InclusionExact)->Arg(4)->Arg(8)->Arg(12);

static void BM_NormalizedGradient(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dist = random_distribution(n, rng);
  const std::vector<double> pi(dist.probabilities().begin(), dist.probabilities().end());
  const auto sample = sample_without_replacement(dist, n / 2, rng);
  std::vector<double> q(sample.k(), 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += 0.5 * static_cast<double>(i);
  const ScoreFunction score = [&](std::size_t a) {
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = (j == a ? 1.0 : 0.0) - pi[j];
    return g;
  };
  const StateGradientInput input{pi, &sample, q, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(normalized_gradient(input, score).data());
}
BENCHMARK(BM_NormalizedGradient)->Arg(4)->Arg(12);

static void BM_ImagineTdLambda(benchmark::State& state) {
  const Network policy = policy_net(32);
  const OracleDynamics dyn(
      4, 2,
      [](std::span<const double> z, std::size_t a) {
        return LatentState{z[0] + 0.02 * z[1], z[1] + (a ? 0.1 : -0.1), z[2] + 0.02 * z[3], z[3] - 0.1 * z[2]};
      },
      [](std::span<const double>, std::size_t) { return 1.0; });
  const ValueFunction v = [](std::span<const double> z) { return -z[2] * z[2]; };
  const auto h = static_cast<std::size_t>(state.range(0));
  const std::vector<double> z0 = {0.0, 0.1, -0.02, 0.05};
  Rng rng(5);
  for (auto _ : state) {
    const auto t = imagine(dyn, policy, z0, 1, h, rng);
    benchmark::DoNotOptimize(td_lambda(t, 0.75, h, v, 0.99));
  }
}
BENCHMARK(BM_ImagineTdLambda)->Arg(5)->Arg(15)->Arg(45);

BENCHMARK_MAIN();
