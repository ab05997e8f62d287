// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>

#include "ratgreedy/minimax.hpp"
#include "ratgreedy/pso.hpp"

namespace ratgreedy {

/// Where each part of a greedy run happens: L2 steps on `fit`, uniform
/// errors (and the uniform-norm solves) on `eval`.
struct FitSettings {
  explicit FitSettings(Interval on) : fit(on), eval(on) {}
  FitSettings(Interval fit_interval, Interval eval_interval)
      : fit(fit_interval), eval(eval_interval) {}

  Interval fit;
  Interval eval;
  GridSpec grid{};
  QuadratureRule quad{};
};

enum class ImprovedMode {
  /// One uniform-norm solve after the last greedy step.
  FinalOnly,
  /// A uniform-norm solve after every greedy step; errors are non-increasing.
  EveryStep,
};

/// Greedy pole/exponent search objective |(r, g_param)| with r sampled on a
/// fixed panel rule. Exposed for brute-force cross-checks.
class GreedyObjective {
public:
  GreedyObjective(const TargetFunction& f, const DictionarySpec& dict, const Interval& fit);

  /// Sets the current approximation; the residual is f - phi.
  void set_approximant(const Approximant& phi);
  double operator()(double param) const;

private:
  DictionarySpec dict_;
  PanelRule rule_;
  std::vector<double> f_;
  std::vector<double> weighted_residual_;
};

/// Pole (or exponent) maximizing the greedy objective. Poles are searched in
/// log10(-p), exponents linearly.
double greedy_select(const GreedyObjective& objective, const DictionarySpec& dict,
                     const PsoConfig& pso);

GreedyTrace run_oga(const TargetFunction& f, const DictionarySpec& dict, const FitSettings& on,
                    int n, const PsoConfig& pso);

/// Greedy steps as in run_oga followed by a uniform-norm solve warm-started
/// from the projection coefficients. A positive `target_error` stops at the
/// first step whose uniform-norm error reaches it (the solve then runs at
/// every step).
GreedyTrace run_improved_oga(const TargetFunction& f, const DictionarySpec& dict,
                             const FitSettings& on, int n, const PsoConfig& pso,
                             ImprovedMode mode = ImprovedMode::FinalOnly,
                             double target_error = 0.0);

struct WcgaConfig {
  /// Weakness sequence t_k in (0, 1], k >= 1.
  std::function<double(int)> t_sequence = [](int k) { return std::pow(static_cast<double>(k), -0.5); };
  /// Candidate windows are split into m + 1 points.
  int m = 100;
  int max_terms = 12;
  /// Stop once the uniform error is at or below this (0 disables).
  double target_error = 0.0;

  void validate() const;
};

/// Window of parameters meeting the weak greedy inequality
/// |g(z*)| >= t sup_{g in D} |g(z*)| for the symmetric dictionary +-D.
/// Exposed for property tests.
struct WeakWindow {
  double left;
  double right;
  bool degenerate;
};

WeakWindow weak_greedy_window(const DictionarySpec& dict, double zstar, double t);

GreedyTrace run_wcga(const TargetFunction& f, const DictionarySpec& dict, const FitSettings& on,
                     const WcgaConfig& cfg);

} // namespace ratgreedy
