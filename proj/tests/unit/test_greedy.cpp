// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ratgreedy/greedy.hpp"

using namespace ratgreedy;

namespace {

const PoleWindow kWindow(-25.0, -2.5e-9);

bool non_increasing(const std::vector<double>& v, double rel = 1e-12) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] * (1 + rel))
      return false;
  return true;
}

TargetFunction random_two_term(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> s(0.05, 2.0), t(0.5, 2.0), a(0.1, 0.9), b(-0.9, -0.1);
  return TargetFunction::two_term(s(rng), t(rng), a(rng), b(rng));
}

PsoConfig seeded(std::uint64_t seed) {
  PsoConfig p;
  p.seed = seed;
  return p;
}

} // namespace

TEST_CASE("pso on a unimodal objective") {
  const PsoResult r =
      pso_maximize([](double p) { return -(p + 3.0) * (p + 3.0); }, -10.0, -1.0, seeded(1));
  CHECK(r.arg == doctest::Approx(-3.0).epsilon(1e-6));
  CHECK(std::abs(r.value) <= 1e-6);
}

TEST_CASE("pso is deterministic and validates its config") {
  const auto obj = [](double x) { return std::sin(5 * x) + 0.3 * x; };
  const PsoResult a = pso_maximize(obj, 0.0, 4.0, seeded(9));
  const PsoResult b = pso_maximize(obj, 0.0, 4.0, seeded(9));
  CHECK(a.arg == b.arg);
  CHECK(a.value == b.value);
  PsoConfig bad;
  bad.swarm_size = 1;
  CHECK_THROWS_AS(pso_maximize(obj, 0.0, 1.0, bad), DomainError);
  bad = PsoConfig{};
  bad.iterations = 0;
  CHECK_THROWS_AS(pso_maximize(obj, 0.0, 1.0, bad), DomainError);
  const auto dense = oracle::scan_argmax(obj, 0.0, 4.0, 100001);
  CHECK(a.value == doctest::Approx(dense.value).epsilon(1e-8));
}

TEST_CASE("one-step greedy matches a 1e5-point brute-force pole scan") {
  const Interval fit(1e-8, 1.0);
  const PoleWindow window = PoleWindow::standard();
  const auto dict = DictionarySpec::normalized_pole(window, fit);
  const std::vector<TargetFunction> targets{
      TargetFunction::inverse_power(0.5),
      TargetFunction::inverse_power(0.25),
      TargetFunction::inverse_power(0.75),
      TargetFunction::two_term(0.1, 1.0, 0.5, -0.5),
      TargetFunction::two_term(1.0, 2.0, 0.3, -0.6),
  };
  for (const auto& f : targets) {
    GreedyObjective obj(f, dict, fit);
    obj.set_approximant(Approximant());
    const double got = greedy_select(obj, dict, seeded(5));
    const auto scan = oracle::scan_argmax(
        [&](double p) { return obj(p); }, std::log10(-window.right()), std::log10(-window.left()),
        100000, [](double x) { return -std::pow(10.0, x); });
    CHECK(got == doctest::Approx(scan.z).epsilon(1e-3));
    CHECK(got < 0.0);
  }
}

TEST_CASE("first OGA pole for z^-1/2 is near -1.2e-4") {
  const FitSettings on(Interval(1e-8, 1.0), Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  const GreedyTrace t = run_oga(TargetFunction::inverse_power(0.5), dict, on, 1, seeded(42));
  const double p = t.iterations.at(0).param;
  CHECK(p < 0.0);
  CHECK(std::abs(std::log10(-p) - std::log10(1.2e-4)) <= 1.0);
}

TEST_CASE("OGA recovers a single dictionary element") {
  const FitSettings on(Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  const Element g = dict.element(-0.037);
  const auto f = TargetFunction::custom([&](double z) { return 0.8 * g(z); });
  const GreedyTrace t = run_oga(f, dict, on, 1, seeded(3));
  CHECK(t.iterations.at(0).l2_error < 1e-8);
}

TEST_CASE("OGA steps are at least as good as an exhaustive greedy on a 200-point pole grid") {
  const double a = 1e-8, b = 1.0;
  const FitSettings on(Interval(a, b));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  const auto f = [](double z) { return 1.0 / std::sqrt(z); };
  const GreedyTrace t = run_oga(TargetFunction::inverse_power(0.5), dict, on, 2, seeded(42));

  // Oracle: normalized poles, inner products and errors all by adaptive Simpson.
  auto ip = [&](const oracle::Fn& u, const oracle::Fn& v) {
    return oracle::log_integral([&](double z) { return u(z) * v(z); }, a, b, 1e-12);
  };
  auto normalized = [&](double p) -> oracle::Fn {
    const oracle::Fn raw = [p](double z) { return 1.0 / (z - p); };
    const double nrm = std::sqrt(ip(raw, raw));
    return [p, nrm](double z) { return 1.0 / ((z - p) * nrm); };
  };
  std::vector<oracle::Fn> g;
  std::vector<double> m;
  const double l0 = std::log10(-kWindow.right()), l1 = std::log10(-kWindow.left());
  for (int i = 0; i < 200; ++i) {
    g.push_back(normalized(-std::pow(10.0, l0 + (l1 - l0) * i / 199.0)));
    m.push_back(ip(f, g.back()));
  }
  const double f2 = std::log(b / a);

  std::size_t i1 = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::abs(m[i]) > std::abs(m[i1]))
      i1 = i;
  const double err1 = std::sqrt(std::max(0.0, f2 - m[i1] * m[i1]));
  CHECK(t.iterations.at(0).l2_error <= err1 + 1e-6);

  // Step two starts from the residual OGA actually has, so both pick from the
  // same objective (r1, g) with r1 = f - (f, h) h.
  const oracle::Fn h = normalized(t.iterations.at(0).param);
  const double mh = ip(f, h);
  std::size_t i2 = 0;
  double best = -1.0, cross2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double c = ip(h, g[i]);
    const double v = std::abs(m[i] - mh * c);
    if (v > best)
      best = v, i2 = i, cross2 = c;
  }
  Eigen::Matrix2d G;
  G << 1.0, cross2, cross2, 1.0;
  const Eigen::Vector2d mv(mh, m[i2]);
  const double err2 = std::sqrt(std::max(0.0, f2 - mv.dot(G.ldlt().solve(mv))));
  CHECK(t.iterations.at(1).l2_error <= err2 + 1e-6);
}

TEST_CASE("OGA on z^-1/2 with 12 poles lands in the reported error class") {
  const FitSettings on(Interval(1e-8, 1.0), Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  const GreedyTrace t = run_oga(TargetFunction::inverse_power(0.5), dict, on, 12, seeded(42));
  const double e = t.iterations.back().uniform_error;
  CHECK(e <= 3.0 * 1.3);
  CHECK(e >= 1.3 / 3.0);
  const auto l2 = t.l2_errors();
  CHECK(non_increasing(l2, 1e-9));
}

TEST_CASE("improved OGA recovers a single element exactly") {
  const FitSettings on(Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  const Element g = dict.element(-0.5);
  const auto f = TargetFunction::custom([&](double z) { return g(z); });
  const GreedyTrace t = run_improved_oga(f, dict, on, 1, seeded(1));
  CHECK(t.iterations.back().uniform_error <= 1e-10);
}

TEST_CASE("improved OGA dominates OGA and every-step errors are monotone") {
  std::mt19937_64 rng(77);
  const FitSettings on(Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  for (int trial = 0; trial < 4; ++trial) {
    const TargetFunction f = random_two_term(rng);
    const GreedyTrace oga = run_oga(f, dict, on, 5, seeded(trial));
    const GreedyTrace fin = run_improved_oga(f, dict, on, 5, seeded(trial));
    const GreedyTrace every =
        run_improved_oga(f, dict, on, 5, seeded(trial), ImprovedMode::EveryStep);
    CHECK(fin.iterations.back().uniform_error <=
          oga.iterations.back().uniform_error * (1 + 1e-12));
    CHECK(non_increasing(every.uniform_errors()));
    for (double p : every.final.params())
      CHECK(p < 0.0);
  }
}

TEST_CASE("improved OGA stops at the target error") {
  const FitSettings on(Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  const GreedyTrace t = run_improved_oga(TargetFunction::inverse_power(0.5), dict, on, 12,
                                         seeded(42), ImprovedMode::FinalOnly, 0.2);
  CHECK(t.iterations.back().uniform_error <= 0.2);
  CHECK(t.iterations.size() < 12);
}

TEST_CASE("weak greedy window satisfies the weak inequality") {
  const auto plain = DictionarySpec::plain_pole(kWindow);
  for (double zstar : {1e-6, 1e-3, 0.5, 1.0}) {
    for (double t : {1.0, 0.7, 1.0 / std::sqrt(5.0), 0.1}) {
      const WeakWindow w = weak_greedy_window(plain, zstar, t);
      const double sup = 1.0 / (zstar - kWindow.right());
      CHECK(w.left <= w.right);
      CHECK(w.right == kWindow.right());
      for (int i = 0; i <= 20; ++i) {
        const double p = w.left + (w.right - w.left) * i / 20.0;
        CHECK(1.0 / (zstar - p) >= t * sup * (1 - 1e-12));
      }
      if (w.left > kWindow.left()) {
        const double outside = w.left - 1e-6 * std::abs(w.left);
        CHECK(1.0 / (zstar - outside) < t * sup);
      }
    }
  }
  const auto power = DictionarySpec::negative_power(1e-8, 1 - 1e-8);
  for (double zstar : {1e-6, 0.2, 2.0}) {
    const double t = 0.5;
    const WeakWindow w = weak_greedy_window(power, zstar, t);
    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i)
      sup = std::max(sup, std::pow(zstar, -(1e-8 + (1 - 2e-8) * i / 1000.0)));
    for (int i = 0; i <= 20; ++i) {
      const double eta = w.left + (w.right - w.left) * i / 20.0;
      CHECK(std::pow(zstar, -eta) >= t * sup * (1 - 1e-9));
    }
  }
  CHECK_THROWS_AS(
      weak_greedy_window(DictionarySpec::normalized_pole(kWindow, Interval(1e-6, 1.0)), 0.5, 0.5),
      DomainError);
}

TEST_CASE("WCGA recovers a plain pole and is monotone") {
  const FitSettings on(Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::plain_pole(kWindow);
  WcgaConfig cfg;
  cfg.max_terms = 6;
  // With t_1 = 1 the first window is the single maximizer of |g(z*)|, the
  // right end of the window, so a pole placed there is recovered at once.
  const double edge = kWindow.right();
  const auto g = TargetFunction::custom([edge](double z) { return 3.0 / (z - edge); });
  const auto ge = run_wcga(g, dict, on, cfg).uniform_errors();
  CHECK(*std::min_element(ge.begin(), ge.end()) < 1e-8);

  // An interior pole is only reached through the shrinking weak windows.
  cfg.max_terms = 12;
  const auto f = TargetFunction::custom([](double z) { return 1.0 / (z + 0.25); });
  const auto errs = run_wcga(f, dict, on, cfg).uniform_errors();
  CHECK(errs.back() < 1e-5 * errs.front());
  CHECK(non_increasing(errs));
  cfg.max_terms = 6;

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const GreedyTrace r = run_wcga(random_two_term(rng), dict, on, cfg);
    CHECK(non_increasing(r.uniform_errors()));
    for (double p : r.final.params())
      CHECK(p < 0.0);
  }
}

TEST_CASE("WCGA is deterministic") {
  const FitSettings on(Interval(1e-6, 1.0));
  WcgaConfig cfg;
  cfg.max_terms = 5;
  const auto f = TargetFunction::two_term(0.1, 1.0, 0.5, -0.5);
  const GreedyTrace a = run_wcga(f, DictionarySpec::plain_pole(kWindow), on, cfg);
  const GreedyTrace b = run_wcga(f, DictionarySpec::plain_pole(kWindow), on, cfg);
  CHECK(a.final.params() == b.final.params());
  CHECK(a.final.coeffs() == b.final.coeffs());
}

TEST_CASE("argument validation") {
  const FitSettings on(Interval(1e-6, 1.0));
  const auto dict = DictionarySpec::normalized_pole(kWindow, on.fit);
  const auto f = TargetFunction::inverse_power(0.5);
  CHECK_THROWS_AS(run_oga(f, dict, on, 0, PsoConfig{}), DomainError);
  WcgaConfig cfg;
  cfg.max_terms = 0;
  CHECK_THROWS_AS(run_wcga(f, DictionarySpec::plain_pole(kWindow), on, cfg), DomainError);
  cfg = WcgaConfig{};
  cfg.t_sequence = [](int) { return 1.5; };
  CHECK_THROWS_AS(run_wcga(f, DictionarySpec::plain_pole(kWindow), on, cfg), DomainError);
  CHECK_THROWS_AS(run_oga(f, dict, FitSettings(Interval(0.0, 1.0)), 2, PsoConfig{}), DomainError);
}
