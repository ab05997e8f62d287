// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace ratgreedy {

SpdMatrix::SpdMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols())
    throw DomainError("SPD matrix must be square and non-empty");
  if (!a_.allFinite())
    throw DomainError("SPD matrix has non-finite entries");
  const double scale = std::max(a_.cwiseAbs().maxCoeff(), 1e-300);
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_);
  if (eig.info() != Eigen::Success)
    throw FactorizationError("symmetric eigensolver failed");
  evals_ = eig.eigenvalues();
  evecs_ = eig.eigenvectors();
  if (!(evals_(0) > 0.0))
    throw DomainError("matrix is not positive definite");
}

Eigen::VectorXd SpdMatrix::apply_spectral(const ScalarFn& g, const Eigen::VectorXd& b) const {
  if (b.size() != dim())
    throw DomainError("vector length does not match matrix dimension");
  Eigen::VectorXd coef = evecs_.transpose() * b;
  for (Eigen::Index i = 0; i < coef.size(); ++i)
    coef(i) *= g(evals_(i));
  return evecs_ * coef;
}

PartialFraction to_partial_fraction(const Approximant& phi) {
  PartialFraction pf;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const Element& e = phi.basis()[j];
    if (!e.is_pole())
      throw UnsupportedConversionError("power-kind approximant has no partial-fraction form");
    pf.poles.push_back(e.param);
    pf.residues.push_back(phi.coeffs()[j] * e.scale);
  }
  pf.validate();
  return pf;
}

ShiftedSolver::ShiftedSolver(const SpdMatrix& a, const PartialFraction& pf) : pf_(pf) {
  pf_.validate();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(a.dim(), a.dim());
  factors_.reserve(pf_.size());
  for (double p : pf_.poles) {
    factors_.emplace_back(a.matrix() - p * eye);
    if (factors_.back().info() != Eigen::Success)
      throw FactorizationError("Cholesky factorization of shifted matrix failed");
  }
}

Eigen::VectorXd ShiftedSolver::apply(const Eigen::VectorXd& b) const {
  Eigen::VectorXd out = pf_.c0 * b;
  for (std::size_t j = 0; j < factors_.size(); ++j)
    out.noalias() += pf_.residues[j] * factors_[j].solve(b);
  return out;
}

Eigen::VectorXd apply_rational(const SpdMatrix& a, const Eigen::VectorXd& b,
                               const PartialFraction& pf) {
  if (b.size() != a.dim())
    throw DomainError("vector length does not match matrix dimension");
  return ShiftedSolver(a, pf).apply(b);
}

Eigen::VectorXd apply_exact(const SpdMatrix& a, const Eigen::VectorXd& b, const TargetFunction& f) {
  return a.apply_spectral([&f](double z) { return f(z); }, b);
}

OperatorBound check_operator_bound(const SpdMatrix& a, const Eigen::VectorXd& b,
                                   const TargetFunction& f, const PartialFraction& pf,
                                   const GridSpec& grid) {
  OperatorBound out;
  const Eigen::VectorXd exact = apply_exact(a, b, f);
  const Eigen::VectorXd approx = apply_rational(a, b, pf);
  out.lhs = (exact - approx).norm();
  auto err = [&](double z) { return f(z) - pf(z); };
  double sup = 0.0;
  if (a.lambda_max() > a.lambda_min())
    sup = sup_norm(err, Interval(a.lambda_min(), a.lambda_max()), grid).value;
  // The eigenvalues lie in the interval; including them keeps the sampled
  // maximum honest when the grid misses a spectral point.
  for (Eigen::Index i = 0; i < a.eigenvalues().size(); ++i)
    sup = std::max(sup, std::abs(err(a.eigenvalues()(i))));
  out.rhs = sup * b.norm();
  // Rounding floor of the two dense evaluations, so that an exact
  // representation (rhs = 0) is not rejected over last-bit noise.
  const double floor = 16.0 * static_cast<double>(a.dim()) * std::numeric_limits<double>::epsilon() *
                       (exact.norm() + approx.norm());
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-8) + floor;
  return out;
}

} // namespace ratgreedy
