// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "ratgreedy/analysis.hpp"

namespace ratgreedy {

struct PsoConfig {
  int swarm_size = 40;
  int iterations = 200;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  std::uint64_t seed = 0;

  /// Throws DomainError on swarm_size < 2 or iterations < 1.
  void validate() const;
};

struct PsoResult {
  double arg = 0.0;
  double value = 0.0;
};

/// Maximizes a scalar objective on [lo, hi] with a particle swarm. Fully
/// deterministic for a fixed seed.
PsoResult pso_maximize(const ScalarFn& objective, double lo, double hi, const PsoConfig& cfg);

/// splitmix64 step; used to derive independent per-call seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace ratgreedy
