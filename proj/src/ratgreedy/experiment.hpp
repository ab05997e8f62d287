// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ratgreedy/precond.hpp"

namespace ratgreedy {

inline constexpr int kSchemaVersion = 1;

enum class Command { Approx, Compare, PrecondDemo };
enum class Algorithm { Oga, ImprovedOga, Wcga };

struct PrecondSettings {
  std::vector<double> mu{1.0, 1e-2, 1e-4};
  std::vector<double> K{1.0, 1e-2, 1e-4};
  std::vector<int> n{16, 32, 64};
  SweepAlgorithm algorithm = SweepAlgorithm::ImprovedOga;
  double target_error = 0.1;
  int max_terms = 20;
  double tol = 1e-8;
  int max_it = 500;
  PoleWindow window = PoleWindow::standard();

  bool operator==(const PrecondSettings&) const;
};

/// Everything one CLI invocation needs. Defaults are filled on parse and
/// written back out on serialize, so serialize/parse is a fixed point.
struct ExperimentConfig {
  Command command = Command::Approx;
  TargetFunction target = TargetFunction::inverse_power(0.5);
  Interval fit{1e-6, 1.0};
  Interval eval{1e-6, 1.0};

  DictionaryKind dictionary = DictionaryKind::NormalizedPole;
  /// Pole window for pole kinds, eta range for NegativePower.
  double dict_lo = -100.0;
  double dict_hi = -1e-9;

  Algorithm algorithm = Algorithm::ImprovedOga;
  int n = 12;
  ImprovedMode mode = ImprovedMode::FinalOnly;
  double target_error = 0.0;
  PsoConfig pso{};
  int wcga_m = 100;
  /// t_k = k^(-t_exponent).
  double t_exponent = 0.5;

  std::string output_dir = "out";
  std::uint64_t seed = 0;
  bool write_csv = true;
  bool write_json = true;

  PrecondSettings precond{};

  DictionarySpec dictionary_spec() const;
  /// PlainPole variant of the configured pole dictionary (for WCGA).
  DictionarySpec wcga_dictionary() const;
  FitSettings fit_settings() const;
  WcgaConfig wcga_config() const;

  bool operator==(const ExperimentConfig&) const;
};

/// Parses a JSON config. Throws ConfigError naming the offending key on
/// schema violations and DomainError on invalid intervals or windows.
ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& cfg);

std::string to_string(Command c);
std::string to_string(Algorithm a);

struct ExperimentResult {
  /// (algorithm name, trace), one entry for approx, three for compare.
  std::vector<std::pair<std::string, GreedyTrace>> traces;
  std::vector<SweepRow> sweep;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Fixed-layout writers; exposed for golden-file tests.
std::string trace_csv(const GreedyTrace& trace);
std::string plot_csv(const ExperimentConfig& cfg, const GreedyTrace& trace);
std::string approximant_json(const ExperimentConfig& cfg, const std::string& algorithm,
                             const GreedyTrace& trace);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);

/// Writes all report files into cfg.output_dir and returns their paths. On
/// failure, files written so far are removed before rethrowing.
std::vector<std::string> write_report(const ExperimentConfig& cfg, const ExperimentResult& result);

} // namespace ratgreedy
