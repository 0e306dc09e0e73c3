#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace wmpg {

using Rng = std::mt19937_64;

/// Uniform draw in the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(rng);
  while (u <= 0.0) u = dist(rng);
  return u;
}

/// Draws an index from an (unnormalised) nonnegative weight vector by inverse CDF.
inline std::size_t sample_categorical(std::span<const double> probabilities, Rng& rng) {
  double total = 0.0;
  for (double p : probabilities) total += p;
  std::uniform_real_distribution<double> dist(0.0, total);
  const double u = dist(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = i;
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return last_positive;
}

/// splitmix64 mixing, used to derive independent stream seeds from one base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace wmpg
