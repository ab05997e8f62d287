// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ratgreedy/errors.hpp"

namespace ratgreedy {

/// Closed interval [lo, hi] with 0 <= lo < hi, both finite.
class Interval {
public:
  Interval(double lo, double hi);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return hi_ - lo_; }
  bool contains(double z) const noexcept { return z >= lo_ && z <= hi_; }

  friend bool operator==(const Interval&, const Interval&) = default;

private:
  double lo_;
  double hi_;
};

/// Admissible pole locations [left, right] with left < right < 0.
class PoleWindow {
public:
  PoleWindow(double left, double right);

  /// [-100, -1e-9]; covers every pole reported for the reference experiments.
  static PoleWindow standard() { return {-100.0, -1e-9}; }

  double left() const noexcept { return left_; }
  double right() const noexcept { return right_; }
  bool contains(double p) const noexcept { return p >= left_ && p <= right_; }

  friend bool operator==(const PoleWindow&, const PoleWindow&) = default;

private:
  double left_;
  double right_;
};

enum class DictionaryKind { NormalizedPole, PlainPole, NegativePower };

const char* to_string(DictionaryKind kind) noexcept;

/// One dictionary element g(z). For pole kinds g(z) = scale / (z - param),
/// for NegativePower g(z) = z^(-param).
struct Element {
  DictionaryKind kind;
  double param;
  double scale = 1.0;

  double operator()(double z) const;
  bool is_pole() const noexcept { return kind != DictionaryKind::NegativePower; }
};

/// Parametric family of basis functions.
class DictionarySpec {
public:
  /// Poles scaled to unit L2 norm on `fit`.
  static DictionarySpec normalized_pole(PoleWindow window, Interval fit);
  static DictionarySpec plain_pole(PoleWindow window);
  /// z^(-eta) with eta in [eta_lo, eta_hi] inside the open interval (0, 1).
  static DictionarySpec negative_power(double eta_lo, double eta_hi);

  DictionaryKind kind() const noexcept { return kind_; }
  bool is_pole_kind() const noexcept { return kind_ != DictionaryKind::NegativePower; }

  /// Window for pole kinds; throws DomainError for NegativePower.
  PoleWindow window() const;
  /// Normalization interval; throws DomainError unless NormalizedPole.
  Interval fit() const;

  /// Parameter bounds (pole window or exponent range).
  double param_lo() const noexcept { return lo_; }
  double param_hi() const noexcept { return hi_; }
  bool admits(double param) const noexcept { return param >= lo_ && param <= hi_; }

  /// Element with parameter `param`; throws DomainError if not admitted.
  Element element(double param) const;

private:
  DictionarySpec(DictionaryKind kind, double lo, double hi) : kind_(kind), lo_(lo), hi_(hi) {}

  DictionaryKind kind_;
  double lo_;
  double hi_;
  double fit_lo_ = 0.0;
  double fit_hi_ = 1.0;
};

/// Factor (1/(a-p) - 1/(b-p))^(-1/2) that gives 1/(z-p) unit L2 norm on [a, b].
double pole_normalization(double p, const Interval& on);

double eval_element(const DictionarySpec& spec, double param, double z);

// ---------------------------------------------------------------------------
// Target functions

struct InversePower {
  double alpha;
};

/// (s z^alpha + t z^beta)^(-1)
struct TwoTermFrac {
  double s;
  double t;
  double alpha;
  double beta;
};

/// Rescaled interface function
/// f~(x) = ((c^(-1/2)/g0) x^(-1/2) + (K c^(1/2)/g0) x^(1/2))^(-1),
/// g0 = max(c^(-1/2), K c^(1/2)). `mu` is carried for the outer scaling mu/g0.
struct RescaledInterface {
  double mu;
  double K;
  double c;

  double gamma0() const;
};

struct Custom {
  std::function<double(double)> fn;
  std::string name = "custom";
};

class TargetFunction {
public:
  using Form = std::variant<InversePower, TwoTermFrac, RescaledInterface, Custom>;

  TargetFunction(Form form);

  static TargetFunction inverse_power(double alpha) { return TargetFunction(InversePower{alpha}); }
  static TargetFunction two_term(double s, double t, double alpha, double beta) {
    return TargetFunction(TwoTermFrac{s, t, alpha, beta});
  }
  static TargetFunction rescaled_interface(double mu, double K, double c) {
    return TargetFunction(RescaledInterface{mu, K, c});
  }
  static TargetFunction custom(std::function<double(double)> fn, std::string name = "custom") {
    return TargetFunction(Custom{std::move(fn), std::move(name)});
  }

  double operator()(double z) const;
  const Form& form() const noexcept { return form_; }
  std::string describe() const;

  /// Throws DomainError unless finite at a set of probe points of `on`.
  void check_finite_on(const Interval& on) const;

private:
  Form form_;
};

// ---------------------------------------------------------------------------
// Approximants

/// Linear combination sum_i coeffs[i] * basis[i](z).
class Approximant {
public:
  Approximant() = default;
  Approximant(std::vector<Element> basis, std::vector<double> coeffs);

  double operator()(double z) const;

  const std::vector<Element>& basis() const noexcept { return basis_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return basis_.size(); }
  bool empty() const noexcept { return basis_.empty(); }
  bool is_pole_kind() const noexcept;

  std::vector<double> params() const;

private:
  std::vector<Element> basis_;
  std::vector<double> coeffs_;
};

double eval_approximant(const Approximant& phi, double z);

/// c0 + sum_j residues[j] / (z - poles[j]).
struct PartialFraction {
  double c0 = 0.0;
  std::vector<double> residues;
  std::vector<double> poles;

  /// Throws DomainError on length mismatch or a non-negative pole.
  void validate() const;
  double operator()(double z) const;
  std::size_t size() const noexcept { return poles.size(); }
};

// ---------------------------------------------------------------------------
// Traces

struct IterationRecord {
  double param = 0.0;
  std::vector<double> coeffs;
  double uniform_error = 0.0;
  double l2_error = 0.0;
};

struct GreedyTrace {
  std::vector<IterationRecord> iterations;
  Approximant final;
  /// Numerical events worth surfacing (truncated solves, clamped windows, ...).
  std::vector<std::string> flags;

  std::vector<double> uniform_errors() const;
  std::vector<double> l2_errors() const;
};

} // namespace ratgreedy
