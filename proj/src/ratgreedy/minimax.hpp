// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ratgreedy/analysis.hpp"

namespace ratgreedy {

/// Best uniform approximation of f from span{basis} on an interval.
///
/// The coefficient problem is linear, so it is solved as a discrete
/// Chebyshev problem on a grid (an epigraph linear program handled by a
/// revised simplex on its dual, which is the multiple-point exchange), then
/// the grid is enriched with the refined local maxima of the residual and
/// the problem is re-solved until the certified continuous maximum agrees
/// with the levelled discrete error to `tol`.
struct MinimaxProblem {
  ScalarFn f;
  std::vector<ScalarFn> basis;
  Interval on{0.0, 1.0};
  /// Warm start; the returned error never exceeds the error of `init`.
  std::optional<std::vector<double>> init;
  GridSpec grid;
  double tol = 1e-10;
  int max_exchanges = 200;
  int max_rounds = 10;

  static MinimaxProblem from_elements(const TargetFunction& f, std::span<const Element> basis,
                                      const Interval& on);
};

struct MinimaxResult {
  std::vector<double> coeffs;
  /// Certified sup of |f - sum c_i g_i| after grid refinement.
  double error = 0.0;
  double argmax = 0.0;
  bool converged = false;
  /// True when the warm start beat the exchange solution and was returned.
  bool used_init = false;
  int exchanges = 0;
  int rounds = 0;
  /// Numerical rank of the basis on the grid; dependent columns get 0.
  int rank = 0;
};

MinimaxResult best_uniform_coeffs(const MinimaxProblem& prob);

} // namespace ratgreedy
