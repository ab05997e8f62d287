// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ratgreedy/ratgreedy.h"

namespace {

// 0 ok, 1 usage/config/domain, 2 numerical or i/o failure.
int exit_code(rg_status s) {
  switch (s) {
  case RG_OK:
    return 0;
  case RG_ERR_INVALID_ARGUMENT:
  case RG_ERR_DOMAIN:
  case RG_ERR_CONFIG:
    return 1;
  default:
    return 2;
  }
}

struct Invocation {
  std::string command;
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool print_config = false;
};

int report(rg_status s) {
  std::fprintf(stderr, "ratgreedy: %s: %s\n", rg_status_name(s), rg_last_error());
  return exit_code(s);
}

int run(const Invocation& inv) {
  rg_experiment* e = nullptr;
  rg_status s = rg_experiment_load(inv.config.c_str(), &e);
  if (s != RG_OK)
    return report(s);

  auto done = [&](rg_status st) {
    const int code = st == RG_OK ? 0 : report(st);
    rg_experiment_free(e);
    return code;
  };

  if ((s = rg_experiment_set_command(e, inv.command.c_str())) != RG_OK)
    return done(s);
  if (inv.out && (s = rg_experiment_set_output_dir(e, inv.out->c_str())) != RG_OK)
    return done(s);
  if (inv.seed && (s = rg_experiment_set_seed(e, *inv.seed)) != RG_OK)
    return done(s);

  if (inv.print_config) {
    char* json = nullptr;
    if ((s = rg_experiment_to_json(e, &json)) != RG_OK)
      return done(s);
    std::printf("%s\n", json);
    rg_string_free(json);
    return done(RG_OK);
  }

  if ((s = rg_experiment_run(e)) != RG_OK)
    return done(s);

  char* summary = nullptr;
  if ((s = rg_experiment_summary(e, &summary)) != RG_OK)
    return done(s);
  std::fputs(summary, stdout);
  rg_string_free(summary);
  for (size_t i = 0; i < rg_experiment_file_count(e); ++i)
    std::printf("wrote %s\n", rg_experiment_file(e, i));
  return done(RG_OK);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy rational approximation of fractional operators"};
  app.set_version_flag("--version", std::string(rg_version()));
  app.require_subcommand(1);

  Invocation inv;
  const char* commands[][2] = {
      {"approx", "Run one greedy algorithm on a target function"},
      {"compare", "Run OGA, improved OGA and WCGA side by side"},
      {"precond-demo", "Preconditioning sweep over (mu, K, n)"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config, "Experiment JSON file")->required();
    sub->add_option("--out", inv.out, "Output directory (overrides the config)");
    sub->add_option("--seed", inv.seed, "Random seed (overrides the config)");
    sub->add_flag("--print-config", inv.print_config,
                  "Print the normalized config with defaults and exit");
    sub->callback([&inv, n = std::string(name)] { inv.command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }
  return run(inv);
}
