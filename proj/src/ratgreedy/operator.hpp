// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "ratgreedy/analysis.hpp"

namespace ratgreedy {

/// Dense symmetric positive-definite matrix with its eigendecomposition.
/// Immutable after construction.
class SpdMatrix {
public:
  /// Throws DomainError unless `a` is square, symmetric to 1e-12 (relative to
  /// its largest entry) and has a positive smallest eigenvalue.
  explicit SpdMatrix(Eigen::MatrixXd a);

  const Eigen::MatrixXd& matrix() const noexcept { return a_; }
  Eigen::Index dim() const noexcept { return a_.rows(); }
  double lambda_min() const noexcept { return evals_(0); }
  double lambda_max() const noexcept { return evals_(evals_.size() - 1); }
  const Eigen::VectorXd& eigenvalues() const noexcept { return evals_; }
  const Eigen::MatrixXd& eigenvectors() const noexcept { return evecs_; }

  /// V g(Lambda) V^T b.
  Eigen::VectorXd apply_spectral(const ScalarFn& g, const Eigen::VectorXd& b) const;

private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

/// Pole-kind approximant in partial-fraction form. Normalization factors are
/// folded into the residues; c0 is 0. Throws UnsupportedConversionError for
/// power-kind approximants.
PartialFraction to_partial_fraction(const Approximant& phi);

/// Shifted solves (A - p_j I) x_j = b, one Cholesky factorization per pole.
class ShiftedSolver {
public:
  ShiftedSolver(const SpdMatrix& a, const PartialFraction& pf);

  /// c0 b + sum_j residue_j x_j.
  Eigen::VectorXd apply(const Eigen::VectorXd& b) const;

private:
  PartialFraction pf_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
};

Eigen::VectorXd apply_rational(const SpdMatrix& a, const Eigen::VectorXd& b,
                               const PartialFraction& pf);

Eigen::VectorXd apply_exact(const SpdMatrix& a, const Eigen::VectorXd& b, const TargetFunction& f);

struct OperatorBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// lhs = |f(A) b - R(A) b|_2, rhs = max |f - R| over [lambda_min, lambda_max]
/// times |b|_2.
OperatorBound check_operator_bound(const SpdMatrix& a, const Eigen::VectorXd& b,
                                   const TargetFunction& f, const PartialFraction& pf,
                                   const GridSpec& grid = {});

} // namespace ratgreedy
