// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ratgreedy {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

} // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("interval endpoints must be finite");
  if (!(lo >= 0.0) || !(lo < hi))
    throw DomainError("interval requires 0 <= lo < hi, got [" + num(lo) + ", " + num(hi) + "]");
}

PoleWindow::PoleWindow(double left, double right) : left_(left), right_(right) {
  if (!std::isfinite(left) || !std::isfinite(right) || !(left < right) || !(right < 0.0))
    throw DomainError("pole window requires left < right < 0, got [" + num(left) + ", " +
                      num(right) + "]");
}

const char* to_string(DictionaryKind kind) noexcept {
  switch (kind) {
  case DictionaryKind::NormalizedPole:
    return "normalized_pole";
  case DictionaryKind::PlainPole:
    return "plain_pole";
  case DictionaryKind::NegativePower:
    return "negative_power";
  }
  return "unknown";
}

double Element::operator()(double z) const {
  if (kind == DictionaryKind::NegativePower)
    return std::pow(z, -param);
  if (z == param)
    throw PoleEvaluationError("element evaluated at its pole p = " + num(param));
  return scale / (z - param);
}

double pole_normalization(double p, const Interval& on) {
  // 1/(a-p) - 1/(b-p) = (b-a) / ((a-p)(b-p)), written without cancellation.
  const double a = on.lo();
  const double b = on.hi();
  return std::sqrt((a - p) * (b - p) / (b - a));
}

DictionarySpec DictionarySpec::normalized_pole(PoleWindow window, Interval fit) {
  DictionarySpec spec(DictionaryKind::NormalizedPole, window.left(), window.right());
  spec.fit_lo_ = fit.lo();
  spec.fit_hi_ = fit.hi();
  return spec;
}

DictionarySpec DictionarySpec::plain_pole(PoleWindow window) {
  return {DictionaryKind::PlainPole, window.left(), window.right()};
}

DictionarySpec DictionarySpec::negative_power(double eta_lo, double eta_hi) {
  if (!(eta_lo > 0.0) || !(eta_hi < 1.0) || !(eta_lo < eta_hi))
    throw DomainError("exponent range must satisfy 0 < lo < hi < 1, got (" + num(eta_lo) + ", " +
                      num(eta_hi) + ")");
  return {DictionaryKind::NegativePower, eta_lo, eta_hi};
}

PoleWindow DictionarySpec::window() const {
  if (!is_pole_kind())
    throw DomainError("negative-power dictionary has no pole window");
  return {lo_, hi_};
}

Interval DictionarySpec::fit() const {
  if (kind_ != DictionaryKind::NormalizedPole)
    throw DomainError("only the normalized-pole dictionary carries a fit interval");
  return {fit_lo_, fit_hi_};
}

Element DictionarySpec::element(double param) const {
  if (!admits(param))
    throw DomainError(std::string("parameter ") + num(param) + " outside " + to_string(kind_) +
                      " range [" + num(lo_) + ", " + num(hi_) + "]");
  Element e{kind_, param, 1.0};
  if (kind_ == DictionaryKind::NormalizedPole)
    e.scale = pole_normalization(param, Interval(fit_lo_, fit_hi_));
  return e;
}

double eval_element(const DictionarySpec& spec, double param, double z) {
  return spec.element(param)(z);
}

// ---------------------------------------------------------------------------

double RescaledInterface::gamma0() const {
  return std::max(1.0 / std::sqrt(c), K * std::sqrt(c));
}

TargetFunction::TargetFunction(Form form) : form_(std::move(form)) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, InversePower>) {
          if (!(f.alpha > 0.0 && f.alpha < 1.0))
            throw DomainError("inverse power requires alpha in (0, 1)");
        } else if constexpr (std::is_same_v<T, TwoTermFrac>) {
          if (!std::isfinite(f.s) || !std::isfinite(f.t) || !std::isfinite(f.alpha) ||
              !std::isfinite(f.beta))
            throw DomainError("two-term target requires finite parameters");
        } else if constexpr (std::is_same_v<T, RescaledInterface>) {
          if (!(f.mu > 0.0) || !(f.K > 0.0) || !(f.c > 0.0))
            throw DomainError("rescaled interface target requires mu, K, c > 0");
        } else {
          if (!f.fn)
            throw DomainError("custom target requires an evaluator");
        }
      },
      form_);
}

double TargetFunction::operator()(double z) const {
  return std::visit(
      [z](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, InversePower>) {
          return std::pow(z, -f.alpha);
        } else if constexpr (std::is_same_v<T, TwoTermFrac>) {
          return 1.0 / (f.s * std::pow(z, f.alpha) + f.t * std::pow(z, f.beta));
        } else if constexpr (std::is_same_v<T, RescaledInterface>) {
          const double g0 = f.gamma0();
          const double rc = std::sqrt(f.c);
          const double sz = std::sqrt(z);
          return 1.0 / ((1.0 / rc / g0) / sz + (f.K * rc / g0) * sz);
        } else {
          return f.fn(z);
        }
      },
      form_);
}

std::string TargetFunction::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, InversePower>) {
          return "z^(-" + num(f.alpha) + ")";
        } else if constexpr (std::is_same_v<T, TwoTermFrac>) {
          return "(" + num(f.s) + " z^" + num(f.alpha) + " + " + num(f.t) + " z^" + num(f.beta) +
                 ")^(-1)";
        } else if constexpr (std::is_same_v<T, RescaledInterface>) {
          return "rescaled_interface(mu=" + num(f.mu) + ", K=" + num(f.K) + ", c=" + num(f.c) + ")";
        } else {
          return f.name;
        }
      },
      form_);
}

void TargetFunction::check_finite_on(const Interval& on) const {
  constexpr int probes = 33;
  for (int i = 0; i < probes; ++i) {
    const double z = on.lo() + on.width() * i / (probes - 1);
    if (!std::isfinite((*this)(z)))
      throw DomainError(describe() + " is not finite at z = " + num(z));
  }
}

// ---------------------------------------------------------------------------

Approximant::Approximant(std::vector<Element> basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (basis_.size() != coeffs_.size())
    throw DomainError("approximant basis and coefficient lengths differ");
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i].is_pole() && !(basis_[i].param < 0.0))
      throw DomainError("approximant pole " + num(basis_[i].param) + " is not negative");
    for (std::size_t j = 0; j < i; ++j)
      if (basis_[i].param == basis_[j].param && basis_[i].kind == basis_[j].kind)
        throw SingularBasisError("approximant basis repeats parameter " + num(basis_[i].param));
  }
}

double Approximant::operator()(double z) const {
  double s = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    s += coeffs_[i] * basis_[i](z);
  return s;
}

bool Approximant::is_pole_kind() const noexcept {
  return std::all_of(basis_.begin(), basis_.end(), [](const Element& e) { return e.is_pole(); });
}

std::vector<double> Approximant::params() const {
  std::vector<double> out;
  out.reserve(basis_.size());
  for (const auto& e : basis_)
    out.push_back(e.param);
  return out;
}

double eval_approximant(const Approximant& phi, double z) { return phi(z); }

void PartialFraction::validate() const {
  if (residues.size() != poles.size())
    throw DomainError("partial fraction residues and poles differ in length");
  for (double p : poles)
    if (!(p < 0.0))
      throw DomainError("partial fraction pole " + num(p) + " is not negative");
}

double PartialFraction::operator()(double z) const {
  double s = c0;
  for (std::size_t j = 0; j < poles.size(); ++j) {
    if (z == poles[j])
      throw PoleEvaluationError("partial fraction evaluated at pole " + num(poles[j]));
    s += residues[j] / (z - poles[j]);
  }
  return s;
}

std::vector<double> GreedyTrace::uniform_errors() const {
  std::vector<double> out;
  for (const auto& it : iterations)
    out.push_back(it.uniform_error);
  return out;
}

std::vector<double> GreedyTrace::l2_errors() const {
  std::vector<double> out;
  for (const auto& it : iterations)
    out.push_back(it.l2_error);
  return out;
}

} // namespace ratgreedy
