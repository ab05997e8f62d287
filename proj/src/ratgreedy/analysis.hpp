// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ratgreedy/domain.hpp"

namespace ratgreedy {

using ScalarFn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Quadrature

/// Adaptive composite Gauss-Kronrod (7/15) on log-spaced initial panels.
struct QuadratureRule {
  double rel_tol = 1e-11;
  int max_panels = 4096;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
  /// False when max_panels was reached before the error target.
  bool converged = false;
};

/// Integrates `fn` over `on`. The error target is rel_tol * integral(|fn|), so
/// integrals that cancel to (near) zero still terminate.
QuadratureResult integrate(const ScalarFn& fn, const Interval& on, const QuadratureRule& rule = {});

/// L2 inner product (u, v) on `on`; throws QuadratureError if refinement fails.
double inner_product(const ScalarFn& u, const ScalarFn& v, const Interval& on,
                     const QuadratureRule& rule = {});

/// Fixed composite 15-point rule on geometrically graded panels. Used for
/// the many inner products evaluated inside pole searches, where an adaptive
/// rule per evaluation would be wasteful.
class PanelRule {
public:
  explicit PanelRule(const Interval& on, int panels_per_decade = 6);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// sum_i w_i u(z_i) v(z_i) for pre-sampled values.
  double dot(std::span<const double> u, std::span<const double> v) const;

private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Gram systems and projection

/// Closed-form integral of g_i g_j on `on` for pole or power elements.
double element_inner_product(const Element& a, const Element& b, const Interval& on);

struct GramSystem {
  Eigen::MatrixXd gram;
  Eigen::VectorXd moments;
};

/// G[i][j] = (g_i, g_j) in closed form, m[i] = (f, g_i) by adaptive quadrature.
/// Throws SingularBasisError on repeated parameters.
GramSystem gram_and_moments(std::span<const Element> basis, const TargetFunction& f,
                            const Interval& on, const QuadratureRule& rule = {});

struct Projection {
  std::vector<double> coeffs;
  /// Number of Gram eigenvalues discarded by the relative cutoff.
  int truncated = 0;
};

/// Solves G c = m through the symmetric eigendecomposition of G, discarding
/// eigenvalues below cutoff * lambda_max.
Projection solve_gram(const GramSystem& system, double cutoff = 1e-12);

/// Orthogonal L2 projection of f onto span(basis).
Projection project(const TargetFunction& f, std::span<const Element> basis, const Interval& on,
                   const QuadratureRule& rule = {});

// ---------------------------------------------------------------------------
// Uniform norm

/// Sampling grid for sup-norm evaluation: n_points logarithmically spaced
/// points (a uniform quarter-density grid is merged in so that intervals
/// touching 0 are covered), then golden-section refinement of the largest
/// local maxima.
struct GridSpec {
  int n_points = 2000;
  int refine_iters = 40;
  /// How many of the largest local maxima are refined.
  int refine_peaks = 8;

  std::vector<double> points(const Interval& on) const;
};

struct Peak {
  double z = 0.0;
  double value = 0.0; ///< |u(z)|
};

/// Local maxima of |u| on a sorted grid, largest first (at most `max_peaks`),
/// each refined by golden-section search between its grid neighbours.
std::vector<Peak> refined_peaks(const ScalarFn& u, std::span<const double> sorted_grid,
                                std::size_t max_peaks, int iters);

struct SupNorm {
  double value = 0.0;  ///< max |u|
  double argmax = 0.0; ///< z*
  double signed_value = 0.0; ///< u(z*)
};

SupNorm sup_norm(const ScalarFn& u, const Interval& on, const GridSpec& grid = {});

struct UniformError {
  double value = 0.0;
  double argmax = 0.0;
};

UniformError uniform_error(const TargetFunction& f, const Approximant& phi, const Interval& on,
                           const GridSpec& grid = {});

/// L2 norm of f - phi on `on` by adaptive quadrature.
double l2_error(const TargetFunction& f, const Approximant& phi, const Interval& on,
                const QuadratureRule& rule = {});

struct NormingValue {
  double value = 0.0;  ///< sign(r(z*)) g(z*)
  double zstar = 0.0;
  double sign = 0.0;
  /// Set when ||r||_inf < 1e-15; `value` is then 0 and the caller should stop.
  bool converged = false;
};

/// Norming functional of `residual` applied to `g`.
NormingValue norming_functional_apply(const ScalarFn& residual, const ScalarFn& g,
                                      const Interval& on, const GridSpec& grid = {});

} // namespace ratgreedy
