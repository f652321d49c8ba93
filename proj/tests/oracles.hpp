#pragma once

// Brute-force reference implementations used only by tests. Everything here
// enumerates sample paths of the two-state source directly, with no shared
// code or closed forms from the library under test.

#include <cstdint>
#include <random>
#include <vector>

namespace oracles {

// Probability the source is back at its initial value after n slots, by
// enumerating all 2^n flip patterns. Exponential: keep n small.
inline double match_prob(int n, double p) {
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
    int x = 0;
    double w = 1.0;
    for (int t = 0; t < n; ++t) {
      bool flip = bits >> t & 1;
      w *= flip ? 1.0 - p : p;
      if (flip) x ^= 1;
    }
    if (x == 0) total += w;
  }
  return total;
}

// Distribution of theta - (last slot whose value the estimate still matches),
// for an estimate pinned to the source's value at slot 0, by enumerating all
// 2^theta paths.
inline std::vector<double> aoii_distribution(int theta, double p) {
  std::vector<double> mass(std::size_t(theta) + 1, 0.0);
  for (std::uint64_t bits = 0; bits < (1ull << theta); ++bits) {
    int x = 0;
    int last_match = 0;
    double w = 1.0;
    for (int t = 1; t <= theta; ++t) {
      bool flip = bits >> (t - 1) & 1;
      w *= flip ? 1.0 - p : p;
      if (flip) x ^= 1;
      if (x == 0) last_match = t;
    }
    mass[std::size_t(theta - last_match)] += w;
  }
  return mass;
}

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Monte Carlo estimate of the expected value of the aoii_distribution above,
// by sampling hidden paths instead of enumerating them.
inline McEstimate mc_expected_aoii(int theta, double p, long paths, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  double sum = 0.0, sum_sq = 0.0;
  for (long k = 0; k < paths; ++k) {
    int x = 0;
    int last_match = 0;
    for (int t = 1; t <= theta; ++t) {
      if (uniform() >= p) x ^= 1;
      if (x == 0) last_match = t;
    }
    double v = double(theta - last_match);
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / double(paths);
  double var = (sum_sq - sum * sum / double(paths)) / double(paths - 1);
  return {mean, std::sqrt(var / double(paths))};
}

}  // namespace oracles
