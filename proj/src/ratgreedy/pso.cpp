// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/pso.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

namespace ratgreedy {

namespace {

// Bit-level conversion so the stream does not depend on the standard
// library's distribution implementation.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

void PsoConfig::validate() const {
  if (swarm_size < 2)
    throw DomainError("particle swarm needs at least two particles");
  if (iterations < 1)
    throw DomainError("particle swarm needs at least one iteration");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PsoResult pso_maximize(const ScalarFn& objective, double lo, double hi, const PsoConfig& cfg) {
  cfg.validate();
  if (!(lo <= hi))
    throw DomainError("particle swarm window is empty");
  const int n = cfg.swarm_size;
  const double span = hi - lo;
  if (span == 0.0)
    return {lo, objective(lo)};

  std::mt19937_64 rng(cfg.seed);
  std::vector<double> x(n), v(n), best_x(n), best_f(n);
  PsoResult global{lo, -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < n; ++i) {
    // Stratified start: one particle per slice of the window.
    x[i] = lo + span * (i + unit(rng)) / n;
    v[i] = span * (unit(rng) - 0.5) * 0.2;
    best_x[i] = x[i];
    best_f[i] = objective(x[i]);
    if (best_f[i] > global.value)
      global = {x[i], best_f[i]};
  }
  const double vmax = 0.5 * span;
  for (int it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < n; ++i) {
      const double r1 = unit(rng);
      const double r2 = unit(rng);
      v[i] = cfg.inertia * v[i] + cfg.cognitive * r1 * (best_x[i] - x[i]) +
             cfg.social * r2 * (global.arg - x[i]);
      v[i] = std::clamp(v[i], -vmax, vmax);
      x[i] += v[i];
      if (x[i] < lo || x[i] > hi) {
        x[i] = std::clamp(x[i], lo, hi);
        v[i] = 0.0;
      }
      const double fx = objective(x[i]);
      if (fx > best_f[i]) {
        best_f[i] = fx;
        best_x[i] = x[i];
        if (fx > global.value)
          global = {x[i], fx};
      }
    }
  }
  return global;
}

} // namespace ratgreedy
