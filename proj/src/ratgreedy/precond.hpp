// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ratgreedy/greedy.hpp"
#include "ratgreedy/operator.hpp"

namespace ratgreedy {

/// 1-D model of the interface operator S = mu^-1 (A^-1/2 + K A^1/2) with
/// A = h^-2 tridiag(-1, 2, -1) + I, h = 1/(n+1) (Dirichlet).
class SurrogateOperator {
public:
  SurrogateOperator(int n, double mu, double K);

  int n() const noexcept { return n_; }
  double mu() const noexcept { return mu_; }
  double K() const noexcept { return K_; }
  const SpdMatrix& A() const noexcept { return a_; }

  /// Scalar symbol of S and of its inverse at an eigenvalue z of A.
  double symbol(double z) const;
  double inverse_symbol(double z) const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& b) const;

private:
  int n_;
  double mu_;
  double K_;
  SpdMatrix a_;
};

Eigen::MatrixXd shifted_laplacian_1d(int n);

struct RescaledTarget {
  TargetFunction f;
  double c;
  double gamma0;
};

/// Target f~ on (0, 1] with mu (z^-1/2 + K z^1/2)^-1 = (mu/gamma0) f~(z/c).
RescaledTarget rescale_target(double mu, double K, double c);

/// Maps an approximant of f~ (variable z/c) to one of mu (z^-1/2 + K z^1/2)^-1:
/// residues (mu/gamma0) c r_j, poles c p_j, constant (mu/gamma0) c0.
PartialFraction unscale_partial_fraction(const PartialFraction& pf, double mu, double gamma0,
                                         double c);

/// Linear preconditioner x -> M x. `spd` selects conjugate gradients.
struct Preconditioner {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
  bool spd = true;
  std::string name;

  static Preconditioner identity();
  static Preconditioner exact_inverse(const SurrogateOperator& op);
  /// R(A) by shifted solves; SPD when c0 >= 0 and every residue is positive.
  static Preconditioner rational(const SurrogateOperator& op, const PartialFraction& pf);
};

struct SolveReport {
  int iterations = 0;
  /// Relative residual |b - S x| / |b|, starting with 1 at x = 0.
  std::vector<double> residual_history;
  bool converged = false;
  std::string krylov; ///< "pcg" or "gmres"
};

/// Solves S x = rhs from x = 0 to relative residual `tol`. Reaching `max_it`
/// is reported through `converged`, not thrown.
SolveReport run_preconditioned_solve(const SurrogateOperator& op, const Preconditioner& m,
                                     const Eigen::VectorXd& rhs, double tol = 1e-8,
                                     int max_it = 500);

enum class SweepAlgorithm { ImprovedOga, Wcga };

struct SweepSettings {
  SweepAlgorithm algorithm = SweepAlgorithm::ImprovedOga;
  double target_error = 0.1;
  /// Upper bound on the number of greedy terms per cell.
  int max_terms = 20;
  double tol = 1e-8;
  int max_it = 500;
  PsoConfig pso{};
  PoleWindow window = PoleWindow::standard();
};

struct SweepRow {
  double mu = 0.0;
  double K = 0.0;
  int n = 0;
  int n_poles = 0;
  double uniform_error = 0.0;
  int iterations = 0;
  int exact_iterations = 0;
  int delta = 0;
  std::string krylov;
  bool min_residue_positive = true;
  /// "ok", "not_converged", "target_missed" or "error: <message>".
  std::string status;
  PartialFraction approximant;
};

/// Fits S^-1 for one (mu, K, n) and compares preconditioned iteration counts
/// against the exact inverse. Errors are recorded in the row.
SweepRow sweep_cell(double mu, double K, int n, const SweepSettings& settings);

std::vector<SweepRow> sweep(const std::vector<double>& mu_list, const std::vector<double>& K_list,
                            const std::vector<int>& n_list, const SweepSettings& settings);

} // namespace ratgreedy
