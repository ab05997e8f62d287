// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/precond.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace ratgreedy {

Eigen::MatrixXd shifted_laplacian_1d(int n) {
  if (n < 1)
    throw DomainError("surrogate grid size must be >= 1");
  const double h = 1.0 / (n + 1);
  const double inv_h2 = 1.0 / (h * h);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 * inv_h2 + 1.0;
    if (i + 1 < n) {
      a(i, i + 1) = -inv_h2;
      a(i + 1, i) = -inv_h2;
    }
  }
  return a;
}

SurrogateOperator::SurrogateOperator(int n, double mu, double K)
    : n_(n), mu_(mu), K_(K), a_(shifted_laplacian_1d(n)) {
  if (!(mu > 0.0) || !(K > 0.0))
    throw DomainError("surrogate operator requires mu, K > 0");
}

double SurrogateOperator::symbol(double z) const {
  const double s = std::sqrt(z);
  return (1.0 / s + K_ * s) / mu_;
}

double SurrogateOperator::inverse_symbol(double z) const { return 1.0 / symbol(z); }

Eigen::VectorXd SurrogateOperator::apply(const Eigen::VectorXd& x) const {
  return a_.apply_spectral([this](double z) { return symbol(z); }, x);
}

Eigen::VectorXd SurrogateOperator::apply_inverse(const Eigen::VectorXd& b) const {
  return a_.apply_spectral([this](double z) { return inverse_symbol(z); }, b);
}

RescaledTarget rescale_target(double mu, double K, double c) {
  RescaledTarget out{TargetFunction::rescaled_interface(mu, K, c), c, 0.0};
  out.gamma0 = RescaledInterface{mu, K, c}.gamma0();
  return out;
}

PartialFraction unscale_partial_fraction(const PartialFraction& pf, double mu, double gamma0,
                                         double c) {
  pf.validate();
  const double w = mu / gamma0;
  PartialFraction out;
  out.c0 = w * pf.c0;
  for (std::size_t j = 0; j < pf.size(); ++j) {
    out.residues.push_back(w * c * pf.residues[j]);
    out.poles.push_back(c * pf.poles[j]);
  }
  return out;
}

Preconditioner Preconditioner::identity() {
  return {[](const Eigen::VectorXd& r) { return r; }, true, "identity"};
}

Preconditioner Preconditioner::exact_inverse(const SurrogateOperator& op) {
  return {[&op](const Eigen::VectorXd& r) { return op.apply_inverse(r); }, true, "exact"};
}

Preconditioner Preconditioner::rational(const SurrogateOperator& op, const PartialFraction& pf) {
  auto solver = std::make_shared<ShiftedSolver>(op.A(), pf);
  const bool spd = pf.c0 >= 0.0 &&
                   std::all_of(pf.residues.begin(), pf.residues.end(), [](double r) { return r > 0.0; });
  return {[solver](const Eigen::VectorXd& r) { return solver->apply(r); }, spd, "rational"};
}

namespace {

SolveReport pcg(const SurrogateOperator& op, const Preconditioner& m, const Eigen::VectorXd& b,
                double tol, int max_it) {
  SolveReport rep;
  rep.krylov = "pcg";
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = m.apply(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  rep.residual_history.push_back(1.0);
  for (int it = 1; it <= max_it; ++it) {
    const Eigen::VectorXd q = op.apply(p);
    const double alpha = rz / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    const double rel = r.norm() / bnorm;
    rep.residual_history.push_back(rel);
    rep.iterations = it;
    if (rel <= tol) {
      rep.converged = true;
      break;
    }
    z = m.apply(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return rep;
}

// Right-preconditioned GMRES without restarts; the residual it tracks is
// the true one.
SolveReport gmres(const SurrogateOperator& op, const Preconditioner& m, const Eigen::VectorXd& b,
                  double tol, int max_it) {
  SolveReport rep;
  rep.krylov = "gmres";
  const double beta = b.norm();
  const Eigen::Index n = b.size();
  const int kmax = std::max(1, max_it);
  Eigen::MatrixXd v(n, kmax + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(kmax + 1, kmax);
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(kmax);
  Eigen::VectorXd sn = Eigen::VectorXd::Zero(kmax);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(kmax + 1);
  v.col(0) = b / beta;
  g(0) = beta;
  rep.residual_history.push_back(1.0);
  for (int k = 0; k < kmax; ++k) {
    Eigen::VectorXd w = op.apply(m.apply(v.col(k)));
    for (int i = 0; i <= k; ++i) {
      h(i, k) = w.dot(v.col(i));
      w -= h(i, k) * v.col(i);
    }
    const double wnorm = w.norm();
    h(k + 1, k) = wnorm;
    for (int i = 0; i < k; ++i) {
      const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
      h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
      h(i, k) = t;
    }
    const double rho = std::hypot(h(k, k), h(k + 1, k));
    cs(k) = h(k, k) / rho;
    sn(k) = h(k + 1, k) / rho;
    h(k, k) = rho;
    h(k + 1, k) = 0.0;
    g(k + 1) = -sn(k) * g(k);
    g(k) = cs(k) * g(k);
    const double rel = std::abs(g(k + 1)) / beta;
    rep.residual_history.push_back(rel);
    rep.iterations = k + 1;
    // Lucky breakdown: the Krylov space is invariant and the solve is exact.
    if (rel <= tol || wnorm <= 1e-14 * beta) {
      rep.converged = true;
      break;
    }
    v.col(k + 1) = w / wnorm;
  }
  return rep;
}

Eigen::VectorXd sweep_rhs(int n, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(n)));
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i)
    b(i) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  return b;
}

} // namespace

SolveReport run_preconditioned_solve(const SurrogateOperator& op, const Preconditioner& m,
                                     const Eigen::VectorXd& rhs, double tol, int max_it) {
  if (rhs.size() != op.n())
    throw DomainError("right-hand side length does not match the operator");
  if (!(tol > 0.0) || max_it < 1)
    throw DomainError("solver requires tol > 0 and max_it >= 1");
  if (rhs.norm() == 0.0) {
    SolveReport rep;
    rep.krylov = m.spd ? "pcg" : "gmres";
    rep.residual_history = {0.0};
    rep.converged = true;
    return rep;
  }
  return m.spd ? pcg(op, m, rhs, tol, max_it) : gmres(op, m, rhs, tol, max_it);
}

SweepRow sweep_cell(double mu, double K, int n, const SweepSettings& settings) {
  SweepRow row;
  row.mu = mu;
  row.K = K;
  row.n = n;
  try {
    const SurrogateOperator op(n, mu, K);
    const double c = op.A().lambda_max();
    const RescaledTarget rt = rescale_target(mu, K, c);
    const FitSettings on(Interval(op.A().lambda_min() / c, 1.0));

    GreedyTrace trace;
    if (settings.algorithm == SweepAlgorithm::ImprovedOga) {
      const auto dict = DictionarySpec::normalized_pole(settings.window, on.fit);
      trace = run_improved_oga(rt.f, dict, on, settings.max_terms, settings.pso,
                               ImprovedMode::EveryStep, settings.target_error);
    } else {
      WcgaConfig cfg;
      cfg.max_terms = settings.max_terms;
      cfg.target_error = settings.target_error;
      trace = run_wcga(rt.f, DictionarySpec::plain_pole(settings.window), on, cfg);
    }
    row.n_poles = static_cast<int>(trace.final.size());
    row.uniform_error = trace.iterations.empty() ? 0.0 : trace.iterations.back().uniform_error;

    row.approximant = unscale_partial_fraction(to_partial_fraction(trace.final), mu, rt.gamma0, c);
    row.min_residue_positive = std::all_of(row.approximant.residues.begin(),
                                           row.approximant.residues.end(),
                                           [](double r) { return r > 0.0; });
    const Eigen::VectorXd b = sweep_rhs(n, settings.pso.seed);
    const SolveReport exact = run_preconditioned_solve(op, Preconditioner::exact_inverse(op), b,
                                                       settings.tol, settings.max_it);
    const SolveReport rat = run_preconditioned_solve(
        op, Preconditioner::rational(op, row.approximant), b, settings.tol, settings.max_it);
    row.iterations = rat.iterations;
    row.exact_iterations = exact.iterations;
    row.delta = rat.iterations - exact.iterations;
    row.krylov = rat.krylov;
    if (!rat.converged)
      row.status = "not_converged";
    else if (row.uniform_error > settings.target_error)
      row.status = "target_missed";
    else
      row.status = "ok";
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

std::vector<SweepRow> sweep(const std::vector<double>& mu_list, const std::vector<double>& K_list,
                            const std::vector<int>& n_list, const SweepSettings& settings) {
  if (mu_list.empty() || K_list.empty() || n_list.empty())
    throw DomainError("sweep lists must be non-empty");
  std::vector<SweepRow> rows;
  for (double mu : mu_list)
    for (double K : K_list)
      for (int n : n_list)
        rows.push_back(sweep_cell(mu, K, n, settings));
  return rows;
}

} // namespace ratgreedy
