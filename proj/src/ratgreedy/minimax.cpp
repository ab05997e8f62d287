// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace ratgreedy {

namespace {

using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

struct RefPoint {
  Eigen::Index row;
  int sign;
};

/// Orthonormal coordinates of the (column-scaled) grid matrix: A P = Q R.
struct Reduced {
  MatrixR q;
  MatrixR r11;
  Eigen::VectorXi perm;
  int rank = 0;
};

Reduced reduce(const MatrixR& a) {
  Eigen::ColPivHouseholderQR<MatrixR> qr(a.rows(), a.cols());
  qr.setThreshold(1e-13L);
  qr.compute(a);
  Reduced out;
  out.rank = static_cast<int>(qr.rank());
  out.q = qr.householderQ() * MatrixR::Identity(a.rows(), out.rank);
  out.r11 = qr.matrixR().topLeftCorner(out.rank, out.rank).triangularView<Eigen::Upper>();
  out.perm = qr.colsPermutation().indices();
  return out;
}

MatrixR reference_matrix(const Reduced& red, const std::vector<RefPoint>& ref) {
  const int m = red.rank + 1;
  MatrixR b(m, m);
  for (int j = 0; j < m; ++j) {
    b.col(j).head(red.rank) = static_cast<Real>(ref[j].sign) * red.q.row(ref[j].row).transpose();
    b(red.rank, j) = 1.0L;
  }
  return b;
}

/// Assigns signs so that the reference is a feasible basis of the dual program:
/// the signs are those of the null vector of the point matrix.
bool assign_signs(const Reduced& red, std::vector<RefPoint>& ref) {
  const int r = red.rank;
  const int m = r + 1;
  MatrixR pts(r, m);
  for (int j = 0; j < m; ++j)
    pts.col(j) = red.q.row(ref[j].row).transpose();
  VectorR w;
  if (r == 0) {
    w = VectorR::Ones(1);
  } else {
    Eigen::JacobiSVD<MatrixR> svd(pts, Eigen::ComputeFullV);
    w = svd.matrixV().col(m - 1);
  }
  for (int j = 0; j < m; ++j)
    ref[j].sign = w(j) < 0 ? -1 : 1;
  const MatrixR b = reference_matrix(red, ref);
  Eigen::JacobiSVD<MatrixR> bsvd(b);
  const auto& sv = bsvd.singularValues();
  return sv(m - 1) > 1e-15L * sv(0);
}

std::vector<RefPoint> pivoted_reference(const Reduced& red) {
  const Eigen::Index n = red.q.rows();
  const int m = red.rank + 1;
  MatrixR rows(m, n);
  rows.topRows(red.rank) = red.q.transpose();
  rows.row(red.rank).setConstant(1.0L / std::sqrt(static_cast<Real>(n)));
  Eigen::ColPivHouseholderQR<MatrixR> qr(rows);
  std::vector<RefPoint> ref;
  for (int j = 0; j < m; ++j)
    ref.push_back({qr.colsPermutation().indices()(j), 1});
  return ref;
}

struct SimplexOutcome {
  VectorR d;
  Real level = 0;
  int exchanges = 0;
  bool optimal = false;
};

/// Revised simplex on the dual of  min t  s.t. |f_i - q_i . d| <= t.
SimplexOutcome exchange(const Reduced& red, const VectorR& f, std::vector<RefPoint>& ref,
                        int max_exchanges, Real fscale) {
  const int r = red.rank;
  const int m = r + 1;
  const Eigen::Index n = red.q.rows();
  VectorR e_last = VectorR::Zero(m);
  e_last(r) = 1.0L;
  SimplexOutcome out;
  for (;;) {
    const MatrixR b = reference_matrix(red, ref);
    Eigen::PartialPivLU<MatrixR> lu(b);
    VectorR cost(m);
    for (int j = 0; j < m; ++j)
      cost(j) = ref[j].sign * f(ref[j].row);
    const VectorR lambda = lu.solve(e_last);
    const VectorR y = b.transpose().partialPivLu().solve(cost);
    out.d = y.head(r);
    out.level = y(r);

    const VectorR resid = f - red.q * out.d;
    Eigen::Index worst = 0;
    const Real peak = resid.cwiseAbs().maxCoeff(&worst);
    const Real slack = 1e-17L * (fscale + out.d.norm()) + 64 * std::numeric_limits<Real>::epsilon() * fscale;
    if (peak <= out.level + slack) {
      out.optimal = true;
      return out;
    }
    if (out.exchanges >= max_exchanges)
      return out;

    const int sign = resid(worst) < 0 ? -1 : 1;
    VectorR entering(m);
    entering.head(r) = static_cast<Real>(sign) * red.q.row(worst).transpose();
    entering(r) = 1.0L;
    const VectorR w = lu.solve(entering);

    int leave = -1;
    Real best_ratio = std::numeric_limits<Real>::infinity();
    for (int j = 0; j < m; ++j) {
      if (w(j) <= 1e-18L)
        continue;
      const Real ratio = std::max<Real>(lambda(j), 0) / w(j);
      if (ratio < best_ratio || (ratio == best_ratio && leave >= 0 && w(j) > w(leave))) {
        best_ratio = ratio;
        leave = j;
      }
    }
    if (leave < 0)
      return out;
    ref[leave] = {worst, sign};
    ++out.exchanges;
    (void)n;
  }
}

double certified(const MinimaxProblem& prob, const std::vector<double>& c, double* argmax) {
  auto resid = [&](double z) {
    double s = prob.f(z);
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c[j] != 0.0)
        s -= c[j] * prob.basis[j](z);
    return s;
  };
  const auto s = sup_norm(resid, prob.on, prob.grid);
  if (argmax)
    *argmax = s.argmax;
  return s.value;
}

} // namespace

MinimaxProblem MinimaxProblem::from_elements(const TargetFunction& f,
                                             std::span<const Element> basis, const Interval& on) {
  MinimaxProblem prob;
  prob.f = [f](double z) { return f(z); };
  for (const Element& e : basis)
    prob.basis.emplace_back([e](double z) { return e(z); });
  prob.on = on;
  return prob;
}

MinimaxResult best_uniform_coeffs(const MinimaxProblem& prob) {
  const auto k = static_cast<Eigen::Index>(prob.basis.size());
  if (k == 0)
    throw DomainError("minimax requires a non-empty basis");
  if (prob.init && prob.init->size() != prob.basis.size())
    throw DomainError("minimax warm start has the wrong length");

  const std::vector<double> base = prob.grid.points(prob.on);
  std::vector<double> z = base;

  // Column scales from the base grid.
  std::vector<Real> scale(k, 0.0L);
  Real fscale = 0;
  for (double zi : base) {
    fscale = std::max<Real>(fscale, std::abs(prob.f(zi)));
    for (Eigen::Index j = 0; j < k; ++j)
      scale[j] = std::max<Real>(scale[j], std::abs(prob.basis[j](zi)));
  }
  for (auto& s : scale)
    if (!(s > 0))
      s = 1;

  MinimaxResult best;
  best.error = std::numeric_limits<double>::infinity();
  std::vector<RefPoint> ref;
  int total_exchanges = 0;

  for (int round = 0; round < std::max(1, prob.max_rounds); ++round) {
    const auto n = static_cast<Eigen::Index>(z.size());
    MatrixR a(n, k);
    VectorR f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      f(i) = prob.f(z[i]);
      for (Eigen::Index j = 0; j < k; ++j)
        a(i, j) = prob.basis[j](z[i]) / scale[j];
    }
    const Reduced red = reduce(a);
    const int m = red.rank + 1;

    bool ok = static_cast<int>(ref.size()) == m && assign_signs(red, ref);
    if (!ok && round == 0 && prob.init) {
      // Start from the largest local extrema of the warm-start residual.
      const auto& c0 = *prob.init;
      auto resid = [&](double x) {
        double s = prob.f(x);
        for (Eigen::Index j = 0; j < k; ++j)
          s -= c0[j] * prob.basis[j](x);
        return s;
      };
      const auto peaks = refined_peaks(resid, base, static_cast<std::size_t>(m), 0);
      if (static_cast<int>(peaks.size()) == m) {
        ref.clear();
        for (const auto& pk : peaks) {
          const auto it = std::lower_bound(base.begin(), base.end(), pk.z);
          ref.push_back({static_cast<Eigen::Index>(it - base.begin()), 1});
        }
        ok = assign_signs(red, ref);
      }
    }
    if (!ok) {
      ref = pivoted_reference(red);
      assign_signs(red, ref);
    }

    const SimplexOutcome sx = exchange(red, f, ref, prob.max_exchanges, fscale);
    total_exchanges += sx.exchanges;

    // Back to the original coefficients: P^T c = [R11^{-1} d; 0], unscaled.
    VectorR x = VectorR::Zero(k);
    if (red.rank > 0)
      x.head(red.rank) = red.r11.triangularView<Eigen::Upper>().solve(sx.d);
    std::vector<double> c(k, 0.0);
    for (Eigen::Index j = 0; j < k; ++j)
      c[red.perm(j)] = static_cast<double>(x(j) / scale[red.perm(j)]);

    double zmax = 0.0;
    const double err = certified(prob, c, &zmax);
    if (err < best.error) {
      best.coeffs = c;
      best.error = err;
      best.argmax = zmax;
      best.rank = red.rank;
    }
    best.rounds = round + 1;
    const double level = static_cast<double>(sx.level);
    if (sx.optimal &&
        err - level <= prob.tol * err + 1e-14 * static_cast<double>(fscale)) {
      best.converged = true;
      break;
    }

    // Enrich the grid with refined maxima of the current residual.
    auto resid = [&](double xz) {
      double s = prob.f(xz);
      for (Eigen::Index j = 0; j < k; ++j)
        if (c[j] != 0.0)
          s -= c[j] * prob.basis[j](xz);
      return s;
    };
    const auto peaks =
        refined_peaks(resid, base, static_cast<std::size_t>(2 * m + 4), prob.grid.refine_iters);
    const std::size_t before = z.size();
    for (const auto& pk : peaks)
      if (pk.value > level && std::find(z.begin(), z.end(), pk.z) == z.end())
        z.push_back(pk.z);
    if (std::find(z.begin(), z.end(), zmax) == z.end())
      z.push_back(zmax);
    if (z.size() == before)
      break;
  }
  best.exchanges = total_exchanges;

  if (prob.init) {
    double zmax = 0.0;
    const double err = certified(prob, *prob.init, &zmax);
    if (err <= best.error) {
      best.coeffs = *prob.init;
      best.error = err;
      best.argmax = zmax;
      best.used_init = true;
    }
  }
  return best;
}

} // namespace ratgreedy
