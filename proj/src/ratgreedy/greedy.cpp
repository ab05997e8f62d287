// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace ratgreedy {

namespace {

constexpr double kTieTol = 1e-6;

bool has_param(const std::vector<Element>& basis, double param) {
  return std::any_of(basis.begin(), basis.end(),
                     [param](const Element& e) { return e.param == param; });
}

/// A repeated parameter would make the Gram matrix singular: nudge it by the
/// smallest multiple of 1e-12 |p| that lands on a free admissible value.
/// Repeated fallbacks in WCGA can hit the same endpoint several times.
double dedupe(double param, const std::vector<Element>& basis, const DictionarySpec& dict,
              std::vector<std::string>& flags) {
  if (!has_param(basis, param))
    return param;
  const double step = 1e-12 * std::max(std::abs(param), 1e-300);
  double alt = param;
  bool found = false;
  for (int j = 1; j <= 64 && !found; ++j) {
    for (double cand : {param + j * step, param - j * step}) {
      if (dict.admits(cand) && !has_param(basis, cand)) {
        alt = cand;
        found = true;
        break;
      }
    }
  }
  if (!found) {
    std::ostringstream os;
    os.precision(17);
    os << "parameter " << param << " selected twice and cannot be perturbed";
    throw SingularBasisError(os.str());
  }
  std::ostringstream os;
  os.precision(17);
  os << "duplicate parameter " << param << " perturbed to " << alt;
  flags.push_back(os.str());
  return alt;
}

double sup_of(const TargetFunction& f, const Approximant& phi, const FitSettings& on) {
  return uniform_error(f, phi, on.eval, on.grid).value;
}

IterationRecord make_record(const TargetFunction& f, const Approximant& phi,
                            const FitSettings& on) {
  IterationRecord rec;
  rec.param = phi.basis().back().param;
  rec.coeffs = phi.coeffs();
  rec.uniform_error = sup_of(f, phi, on);
  rec.l2_error = l2_error(f, phi, on.fit, on.quad);
  return rec;
}

/// Greedy selection + orthogonal projection. `on_step(k, phi)` is called
/// after each projection and returns false to stop early.
template <class OnStep>
void projection_loop(const TargetFunction& f, const DictionarySpec& dict, const FitSettings& on,
                     int n, const PsoConfig& pso, GreedyTrace& trace, OnStep&& on_step) {
  if (n < 1)
    throw DomainError("greedy run requires n >= 1");
  pso.validate();
  GreedyObjective objective(f, dict, on.fit);
  std::vector<Element> basis;
  Approximant phi;
  for (int k = 1; k <= n; ++k) {
    objective.set_approximant(phi);
    PsoConfig step_cfg = pso;
    step_cfg.seed = mix_seed(pso.seed, static_cast<std::uint64_t>(k));
    const double param = dedupe(greedy_select(objective, dict, step_cfg), basis, dict, trace.flags);
    basis.push_back(dict.element(param));
    const Projection proj = project(f, basis, on.fit, on.quad);
    if (proj.truncated > 0)
      trace.flags.push_back("step " + std::to_string(k) + ": Gram solve truncated " +
                            std::to_string(proj.truncated) + " eigenvalue(s)");
    phi = Approximant(basis, proj.coeffs);
    if (!on_step(k, phi))
      break;
  }
}

/// Anchor point z* of the weak greedy step. After a uniform-norm solve the
/// residual equioscillates, so several extrema tie for the maximum up to
/// solver tolerance. Each of them defines a valid norming functional; the
/// one with the widest admissible window is taken, which contains the others.
double weak_greedy_anchor(const ScalarFn& residual, const DictionarySpec& dict,
                          const FitSettings& on, double t) {
  const auto grid = on.grid.points(on.eval);
  const auto peaks = refined_peaks(residual, grid, 64, on.grid.refine_iters);
  const auto top = sup_norm(residual, on.eval, on.grid);
  double best_z = top.argmax;
  auto width = [&](double z) {
    const WeakWindow w = weak_greedy_window(dict, z, t);
    return w.right - w.left;
  };
  double best_w = width(best_z);
  for (const auto& pk : peaks) {
    if (pk.value < (1.0 - kTieTol) * top.value)
      continue;
    const double w = width(pk.z);
    if (w > best_w || (w == best_w && pk.z > best_z)) {
      best_w = w;
      best_z = pk.z;
    }
  }
  return best_z;
}

} // namespace

// ---------------------------------------------------------------------------

GreedyObjective::GreedyObjective(const TargetFunction& f, const DictionarySpec& dict,
                                 const Interval& fit)
    : dict_(dict), rule_(fit) {
  f.check_finite_on(fit);
  f_.reserve(rule_.size());
  for (double z : rule_.nodes())
    f_.push_back(f(z));
  set_approximant(Approximant());
}

void GreedyObjective::set_approximant(const Approximant& phi) {
  const auto nodes = rule_.nodes();
  const auto w = rule_.weights();
  weighted_residual_.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    weighted_residual_[i] = w[i] * (f_[i] - phi(nodes[i]));
}

double GreedyObjective::operator()(double param) const {
  const Element g = dict_.element(param);
  const auto nodes = rule_.nodes();
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s += weighted_residual_[i] * g(nodes[i]);
  return std::abs(s);
}

namespace {

// A smooth maximum is located by objective values only to about sqrt(eps).
// Newton steps with a fourth-order first derivative bring the argument close
// to machine precision. A step is kept unless it lowers the objective by more
// than rounding, since near the top the values differ only in the last bits.
double polish_max(const std::function<double(double)>& obj, double x, double lo, double hi) {
  const double slack = 8.0 * std::numeric_limits<double>::epsilon();
  double fx = obj(x);
  for (double h : {1e-2, 1e-3}) {
    for (int it = 0; it < 3; ++it) {
      if (x - 2.0 * h < lo || x + 2.0 * h > hi)
        return x;
      const double f1m = obj(x - h), f1p = obj(x + h);
      const double f2m = obj(x - 2.0 * h), f2p = obj(x + 2.0 * h);
      const double d1 = (f2m - 8.0 * f1m + 8.0 * f1p - f2p) / (12.0 * h);
      const double d2 = (f1p - 2.0 * fx + f1m) / (h * h);
      if (!(d2 < 0.0))
        break;
      const double y = x + std::clamp(-d1 / d2, -h, h);
      const double fy = obj(y);
      if (!(fy >= fx - slack * std::abs(fx)))
        break;
      x = y;
      fx = fy;
    }
  }
  return x;
}

} // namespace

double greedy_select(const GreedyObjective& objective, const DictionarySpec& dict,
                     const PsoConfig& pso) {
  const double lo = dict.param_lo();
  const double hi = dict.param_hi();
  if (!dict.is_pole_kind()) {
    auto obj = [&](double eta) { return objective(eta); };
    return polish_max(obj, pso_maximize(obj, lo, hi, pso).arg, lo, hi);
  }
  // Poles spread over many decades: search s = log10(-p).
  auto to_pole = [&](double s) { return std::clamp(-std::pow(10.0, s), lo, hi); };
  auto obj = [&](double s) { return objective(to_pole(s)); };
  const double slo = std::log10(-hi), shi = std::log10(-lo);
  const auto best = pso_maximize(obj, slo, shi, pso);
  return to_pole(polish_max(obj, best.arg, slo, shi));
}

GreedyTrace run_oga(const TargetFunction& f, const DictionarySpec& dict, const FitSettings& on,
                    int n, const PsoConfig& pso) {
  GreedyTrace trace;
  projection_loop(f, dict, on, n, pso, trace, [&](int, const Approximant& phi) {
    trace.iterations.push_back(make_record(f, phi, on));
    trace.final = phi;
    return true;
  });
  return trace;
}

GreedyTrace run_improved_oga(const TargetFunction& f, const DictionarySpec& dict,
                             const FitSettings& on, int n, const PsoConfig& pso, ImprovedMode mode,
                             double target_error) {
  GreedyTrace trace;
  std::vector<double> previous; // last uniform-norm coefficients
  projection_loop(f, dict, on, n, pso, trace, [&](int k, const Approximant& phi) {
    const bool solve = mode == ImprovedMode::EveryStep || target_error > 0.0 || k == n;
    if (!solve) {
      trace.iterations.push_back(make_record(f, phi, on));
      trace.final = phi;
      return true;
    }
    MinimaxProblem prob = MinimaxProblem::from_elements(f, phi.basis(), on.eval);
    prob.grid = on.grid;
    // Warm start from the better of the projection and the zero-padded
    // previous solution, so both monotonicity inequalities carry over.
    std::vector<double> init = phi.coeffs();
    if (!previous.empty()) {
      std::vector<double> padded = previous;
      padded.push_back(0.0);
      if (sup_of(f, Approximant(phi.basis(), padded), on) < sup_of(f, phi, on))
        init = std::move(padded);
    }
    prob.init = init;
    const MinimaxResult res = best_uniform_coeffs(prob);
    if (!res.converged)
      trace.flags.push_back("step " + std::to_string(k) + ": uniform-norm solve not converged");
    previous = res.coeffs;
    const Approximant best(phi.basis(), res.coeffs);
    IterationRecord rec;
    rec.param = best.basis().back().param;
    rec.coeffs = res.coeffs;
    rec.uniform_error = res.error;
    rec.l2_error = l2_error(f, best, on.fit, on.quad);
    trace.iterations.push_back(std::move(rec));
    trace.final = best;
    return !(target_error > 0.0 && res.error <= target_error);
  });
  return trace;
}

// ---------------------------------------------------------------------------

void WcgaConfig::validate() const {
  if (m < 1)
    throw DomainError("WCGA discretization requires m >= 1");
  if (max_terms < 1)
    throw DomainError("WCGA requires max_terms >= 1");
  if (!t_sequence)
    throw DomainError("WCGA requires a weakness sequence");
}

WeakWindow weak_greedy_window(const DictionarySpec& dict, double zstar, double t) {
  if (!(t > 0.0 && t <= 1.0))
    throw DomainError("weakness parameter must lie in (0, 1]");
  const double lo = dict.param_lo();
  const double hi = dict.param_hi();
  WeakWindow w{lo, hi, false};
  if (dict.kind() == DictionaryKind::PlainPole) {
    // g_p(z*) = 1/(z* - p) peaks at the right end of the window, so
    // |g_p(z*)| >= t g_hi(z*)  <=>  p >= z* - (z* - hi) / t.
    w.left = std::max(lo, zstar - (zstar - hi) / t);
  } else if (dict.kind() == DictionaryKind::NegativePower) {
    // g_eta(z*) = exp(eta L) with L = -ln z*, monotone in eta.
    const double L = -std::log(zstar);
    const double reach = std::log(1.0 / t) / std::abs(L);
    if (L > 0.0)
      w.left = std::max(lo, hi - reach);
    else if (L < 0.0)
      w.right = std::min(hi, lo + reach);
  } else {
    throw DomainError("WCGA supports plain-pole and negative-power dictionaries");
  }
  if (!(w.left < w.right)) {
    w.left = w.right;
    w.degenerate = true;
  }
  return w;
}

GreedyTrace run_wcga(const TargetFunction& f, const DictionarySpec& dict, const FitSettings& on,
                     const WcgaConfig& cfg) {
  cfg.validate();
  if (dict.kind() == DictionaryKind::NormalizedPole)
    throw DomainError("WCGA supports plain-pole and negative-power dictionaries");
  f.check_finite_on(on.eval);

  GreedyTrace trace;
  std::vector<Element> basis;
  std::vector<double> coeffs;
  Approximant phi;
  double err_prev = sup_of(f, phi, on);

  for (int k = 1; k <= cfg.max_terms; ++k) {
    if (cfg.target_error > 0.0 && err_prev <= cfg.target_error)
      break;
    const ScalarFn r = [&](double z) { return f(z) - phi(z); };
    if (err_prev < 1e-15) {
      trace.flags.push_back("residual vanished before step " + std::to_string(k));
      break;
    }
    const double t = cfg.t_sequence(k);
    const double zstar = weak_greedy_anchor(r, dict, on, t);
    const WeakWindow win = weak_greedy_window(dict, zstar, t);
    if (win.degenerate)
      trace.flags.push_back("step " + std::to_string(k) + ": candidate window collapsed to one point");

    bool accepted = false;
    const int points = win.degenerate ? 1 : cfg.m + 1;
    for (int i = 0; i < points && !accepted; ++i) {
      const double cand = (win.degenerate || i == cfg.m)
                              ? win.right
                              : win.left + (win.right - win.left) * i / cfg.m;
      if (has_param(basis, cand))
        continue; // same span, cannot improve
      std::vector<Element> trial = basis;
      trial.push_back(dict.element(cand));
      MinimaxProblem prob = MinimaxProblem::from_elements(f, trial, on.eval);
      prob.grid = on.grid;
      std::vector<double> init = coeffs;
      init.push_back(0.0);
      prob.init = std::move(init);
      const MinimaxResult res = best_uniform_coeffs(prob);
      if (res.error < err_prev * (1.0 - 1e-12)) {
        basis = std::move(trial);
        coeffs = res.coeffs;
        err_prev = res.error;
        accepted = true;
      }
    }
    if (!accepted) {
      // Keep the previous approximation with the new element at weight 0.
      const double p = dedupe(win.right, basis, dict, trace.flags);
      basis.push_back(dict.element(p));
      coeffs.push_back(0.0);
      trace.flags.push_back("step " + std::to_string(k) + ": no candidate improved; kept previous");
    }
    phi = Approximant(basis, coeffs);
    IterationRecord rec;
    rec.param = basis.back().param;
    rec.coeffs = coeffs;
    rec.uniform_error = accepted ? err_prev : std::min(err_prev, sup_of(f, phi, on));
    err_prev = rec.uniform_error;
    rec.l2_error = l2_error(f, phi, on.fit, on.quad);
    trace.iterations.push_back(std::move(rec));
    trace.final = phi;
  }
  return trace;
}

} // namespace ratgreedy
