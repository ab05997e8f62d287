// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ratgreedy {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double abs_value;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const ScalarFn& fn, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = fn(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double kabs = std::abs(kron);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = fn(c - dx);
    const double f2 = fn(c + dx);
    kron += kWgk[j] * (f1 + f2);
    kabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1)
      gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h), kabs * std::abs(h)};
}

/// Panel breakpoints graded geometrically toward lo (and toward 0 when lo == 0).
std::vector<double> graded_breaks(const Interval& on, int per_decade) {
  const double lo = on.lo();
  const double hi = on.hi();
  std::vector<double> br;
  if (lo > 0.0 && hi / lo > 2.0) {
    const double decades = std::log10(hi / lo);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * per_decade)));
    for (int i = 0; i <= n; ++i)
      br.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / n));
  } else if (lo == 0.0) {
    const double floor = hi * 1e-15;
    const int n = 15 * per_decade;
    br.push_back(0.0);
    for (int i = 0; i <= n; ++i)
      br.push_back(floor * std::pow(hi / floor, static_cast<double>(i) / n));
  } else {
    const int n = std::max(2, per_decade / 2);
    for (int i = 0; i <= n; ++i)
      br.push_back(lo + (hi - lo) * i / n);
  }
  br.front() = lo;
  br.back() = hi;
  return br;
}

/// log1p(x) / x, continuous at 0.
double log1p_ratio(double x) {
  if (std::abs(x) < 1e-8)
    return 1.0 - x / 2.0 + x * x / 3.0;
  return std::log1p(x) / x;
}

/// Integral of 1/((z-p)(z-q)) over [a, b] for p, q < a.
double pole_pair_integral(double p, double q, double a, double b) {
  const double denom = (a - p) * (b - q);
  const double x = (b - a) * (p - q) / denom;
  // Near x = -1, forming 1 + x from x cancels; build it from the factors.
  if (x < -0.5)
    return std::log((b - p) / (a - p) * ((a - q) / (b - q))) / (p - q);
  return (b - a) / denom * log1p_ratio(x);
}

/// Integral of z^(-s) over [a, b].
double power_integral(double s, double a, double b) {
  const double e = 1.0 - s;
  if (a == 0.0) {
    if (e <= 0.0)
      throw DomainError("integral of z^(-s) with s >= 1 diverges at 0");
    return std::pow(b, e) / e;
  }
  const double t = std::log(a / b);
  if (std::abs(e * t) < 1e-12)
    return std::pow(b, e) * (-t) * (1.0 + e * t / 2.0);
  return std::pow(b, e) * (-std::expm1(e * t)) / e;
}

double golden_maximize(const ScalarFn& h, double lo, double hi, int iters, double& best_x) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = h(x1);
  double f2 = h(x2);
  double best = std::max(f1, f2);
  best_x = f1 >= f2 ? x1 : x2;
  for (int i = 0; i < iters; ++i) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = h(x1);
      if (f1 > best) {
        best = f1;
        best_x = x1;
      }
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = h(x2);
      if (f2 > best) {
        best = f2;
        best_x = x2;
      }
    }
  }
  return best;
}

} // namespace

QuadratureResult integrate(const ScalarFn& fn, const Interval& on, const QuadratureRule& rule) {
  std::priority_queue<Panel> heap;
  double err = 0.0;
  double abs_total = 0.0;
  const auto breaks = graded_breaks(on, 2);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel p = gauss_kronrod(fn, breaks[i], breaks[i + 1]);
    err += p.error;
    abs_total += p.abs_value;
    heap.push(p);
  }
  int panels = static_cast<int>(heap.size());
  while (err > rule.rel_tol * abs_total && panels < rule.max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = (worst.a > 0.0 && worst.b / worst.a > 2.0) ? std::sqrt(worst.a * worst.b)
                                                                   : 0.5 * (worst.a + worst.b);
    const Panel left = gauss_kronrod(fn, worst.a, mid);
    const Panel right = gauss_kronrod(fn, mid, worst.b);
    err += left.error + right.error - worst.error;
    abs_total += left.abs_value + right.abs_value - worst.abs_value;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Recompute the sums from scratch; incremental updates drift.
  QuadratureResult out;
  out.panels = panels;
  double value = 0.0;
  err = 0.0;
  abs_total = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    abs_total += heap.top().abs_value;
    heap.pop();
  }
  out.value = value;
  out.error_estimate = err;
  out.converged = err <= rule.rel_tol * abs_total;
  return out;
}

double inner_product(const ScalarFn& u, const ScalarFn& v, const Interval& on,
                     const QuadratureRule& rule) {
  const auto res = integrate([&](double z) { return u(z) * v(z); }, on, rule);
  if (!res.converged) {
    std::ostringstream os;
    os << "adaptive quadrature did not reach rel_tol " << rule.rel_tol << " within "
       << rule.max_panels << " panels (estimate " << res.value << ", error " << res.error_estimate
       << ")";
    throw QuadratureError(os.str(), res.value);
  }
  return res.value;
}

PanelRule::PanelRule(const Interval& on, int panels_per_decade) {
  const auto breaks = graded_breaks(on, panels_per_decade);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double c = 0.5 * (breaks[i] + breaks[i + 1]);
    const double h = 0.5 * (breaks[i + 1] - breaks[i]);
    for (int j = 0; j < 7; ++j) {
      nodes_.push_back(c - h * kXgk[j]);
      weights_.push_back(h * kWgk[j]);
      nodes_.push_back(c + h * kXgk[j]);
      weights_.push_back(h * kWgk[j]);
    }
    nodes_.push_back(c);
    weights_.push_back(h * kWgk[7]);
  }
}

double PanelRule::dot(std::span<const double> u, std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    s += weights_[i] * u[i] * v[i];
  return s;
}

// ---------------------------------------------------------------------------

double element_inner_product(const Element& a, const Element& b, const Interval& on) {
  if (a.is_pole() && b.is_pole()) {
    // Canonical argument order keeps the Gram matrix exactly symmetric.
    const double p = std::min(a.param, b.param);
    const double q = std::max(a.param, b.param);
    return a.scale * b.scale * pole_pair_integral(p, q, on.lo(), on.hi());
  }
  if (!a.is_pole() && !b.is_pole())
    return power_integral(a.param + b.param, on.lo(), on.hi());
  return inner_product([a](double z) { return a(z); }, [b](double z) { return b(z); }, on);
}

GramSystem gram_and_moments(std::span<const Element> basis, const TargetFunction& f,
                            const Interval& on, const QuadratureRule& rule) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (n == 0)
    throw DomainError("gram system requires a non-empty basis");
  GramSystem sys{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (basis[i].param == basis[j].param && basis[i].kind == basis[j].kind)
        throw SingularBasisError("basis repeats parameter; Gram matrix is singular");
      const double gij = element_inner_product(basis[i], basis[j], on);
      sys.gram(i, j) = gij;
      sys.gram(j, i) = gij;
    }
    sys.gram(i, i) = element_inner_product(basis[i], basis[i], on);
    const Element e = basis[i];
    sys.moments(i) = inner_product([&f](double z) { return f(z); }, [e](double z) { return e(z); },
                                   on, rule);
  }
  return sys;
}

Projection solve_gram(const GramSystem& system, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system.gram);
  if (eig.info() != Eigen::Success)
    throw FactorizationError("Gram eigendecomposition failed");
  const auto& lambda = eig.eigenvalues();
  const auto& vecs = eig.eigenvectors();
  const double lmax = lambda.maxCoeff();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(system.gram.rows());
  Projection out;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) <= cutoff * lmax) {
      ++out.truncated;
      continue;
    }
    c += (vecs.col(i).dot(system.moments) / lambda(i)) * vecs.col(i);
  }
  out.coeffs.assign(c.data(), c.data() + c.size());
  return out;
}

Projection project(const TargetFunction& f, std::span<const Element> basis, const Interval& on,
                   const QuadratureRule& rule) {
  return solve_gram(gram_and_moments(basis, f, on, rule));
}

// ---------------------------------------------------------------------------

std::vector<double> GridSpec::points(const Interval& on) const {
  if (n_points < 2)
    throw DomainError("grid requires at least two points");
  const double lo = on.lo();
  const double hi = on.hi();
  std::vector<double> pts;
  pts.reserve(n_points + n_points / 4 + 2);
  const double log_lo = lo > 0.0 ? lo : hi * 1e-10;
  for (int i = 0; i < n_points; ++i)
    pts.push_back(log_lo * std::pow(hi / log_lo, static_cast<double>(i) / (n_points - 1)));
  const int n_uniform = std::max(2, n_points / 4);
  for (int i = 0; i < n_uniform; ++i)
    pts.push_back(lo + (hi - lo) * i / (n_uniform - 1));
  for (double& z : pts)
    z = std::clamp(z, lo, hi);
  pts.push_back(lo);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<Peak> refined_peaks(const ScalarFn& u, std::span<const double> pts,
                                std::size_t max_peaks, int iters) {
  const std::size_t n = pts.size();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i)
    vals[i] = std::abs(u(pts[i]));

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
    const bool right_ok = i + 1 == n || vals[i] >= vals[i + 1];
    if (left_ok && right_ok)
      peaks.push_back(i);
  }
  const auto keep = std::min(peaks.size(), std::max<std::size_t>(1, max_peaks));
  // Exact ties go to the larger z so that argmax is reproducible.
  std::partial_sort(peaks.begin(), peaks.begin() + keep, peaks.end(),
                    [&](std::size_t a, std::size_t b) {
                      return vals[a] > vals[b] || (vals[a] == vals[b] && a > b);
                    });
  peaks.resize(keep);

  std::vector<Peak> out;
  out.reserve(keep);
  for (const std::size_t i : peaks) {
    Peak pk{pts[i], vals[i]};
    const double a = pts[i == 0 ? 0 : i - 1];
    const double b = pts[i + 1 == n ? n - 1 : i + 1];
    if (a < b && iters > 0) {
      double x = pts[i];
      double best;
      if (a > 0.0) {
        auto h = [&](double s) { return std::abs(u(std::exp(s))); };
        best = golden_maximize(h, std::log(a), std::log(b), iters, x);
        x = std::clamp(std::exp(x), a, b);
      } else {
        auto h = [&](double z) { return std::abs(u(z)); };
        best = golden_maximize(h, a, b, iters, x);
      }
      if (best > pk.value)
        pk = {x, best};
    }
    out.push_back(pk);
  }
  std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) {
    return a.value > b.value || (a.value == b.value && a.z > b.z);
  });
  return out;
}

SupNorm sup_norm(const ScalarFn& u, const Interval& on, const GridSpec& grid) {
  const auto pts = grid.points(on);
  const auto peaks =
      refined_peaks(u, pts, static_cast<std::size_t>(std::max(1, grid.refine_peaks)), grid.refine_iters);
  SupNorm out;
  out.argmax = peaks.front().z;
  out.signed_value = u(out.argmax);
  out.value = std::abs(out.signed_value);
  return out;
}

UniformError uniform_error(const TargetFunction& f, const Approximant& phi, const Interval& on,
                           const GridSpec& grid) {
  const auto s = sup_norm([&](double z) { return f(z) - phi(z); }, on, grid);
  return {s.value, s.argmax};
}

double l2_error(const TargetFunction& f, const Approximant& phi, const Interval& on,
                const QuadratureRule& rule) {
  const auto res = integrate(
      [&](double z) {
        const double r = f(z) - phi(z);
        return r * r;
      },
      on, rule);
  return std::sqrt(std::max(0.0, res.value));
}

NormingValue norming_functional_apply(const ScalarFn& residual, const ScalarFn& g,
                                      const Interval& on, const GridSpec& grid) {
  const auto s = sup_norm(residual, on, grid);
  NormingValue out;
  out.zstar = s.argmax;
  if (s.value < 1e-15) {
    out.converged = true;
    return out;
  }
  out.sign = s.signed_value < 0.0 ? -1.0 : 1.0;
  out.value = out.sign * g(s.argmax);
  return out;
}

} // namespace ratgreedy
