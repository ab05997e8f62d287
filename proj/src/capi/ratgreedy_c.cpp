// SPDX-License-Identifier: Apache-2.0
#include "ratgreedy/ratgreedy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "ratgreedy/experiment.hpp"

using namespace ratgreedy;

struct rg_target {
  TargetFunction f;
};

struct rg_dictionary {
  DictionarySpec d;
};

struct rg_trace {
  GreedyTrace t;
};

struct rg_experiment {
  ExperimentConfig cfg;
  std::optional<ExperimentResult> result;
  std::vector<std::string> files;
};

namespace {

thread_local std::string g_last_error;

rg_status fail(rg_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
rg_status guard(F&& body) {
  try {
    body();
    return RG_OK;
  } catch (const ConfigError& e) {
    return fail(RG_ERR_CONFIG, e.what());
  } catch (const DomainError& e) {
    return fail(RG_ERR_DOMAIN, e.what());
  } catch (const IoError& e) {
    return fail(RG_ERR_IO, e.what());
  } catch (const UnsupportedConversionError& e) {
    return fail(RG_ERR_INVALID_ARGUMENT, e.what());
  } catch (const Error& e) {
    return fail(RG_ERR_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RG_ERR_INTERNAL, "unknown exception");
  }
}

#define RG_REQUIRE(cond, what)                                                                     \
  do {                                                                                             \
    if (!(cond))                                                                                   \
      return fail(RG_ERR_INVALID_ARGUMENT, what);                                                  \
  } while (0)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

FitSettings fit_settings(const rg_options& o) {
  return FitSettings(Interval(o.fit_lo, o.fit_hi), Interval(o.eval_lo, o.eval_hi));
}

PsoConfig pso_config(const rg_options& o) {
  PsoConfig p;
  p.swarm_size = o.swarm_size;
  p.iterations = o.pso_iterations;
  p.inertia = o.inertia;
  p.cognitive = o.cognitive;
  p.social = o.social;
  p.seed = o.seed;
  return p;
}

Eigen::MatrixXd read_matrix(const double* a, size_t n) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i * n + j];
  return m;
}

PartialFraction read_pf(double c0, const double* residues, const double* poles, size_t m) {
  PartialFraction pf;
  pf.c0 = c0;
  pf.residues.assign(residues, residues + m);
  pf.poles.assign(poles, poles + m);
  pf.validate();
  return pf;
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string summarize(const ExperimentConfig& cfg, const ExperimentResult& r) {
  std::ostringstream os;
  for (const auto& [name, trace] : r.traces) {
    const auto params = trace.final.params();
    const double err = trace.iterations.empty() ? 0.0 : trace.iterations.back().uniform_error;
    os << name << ": terms=" << trace.final.size() << " uniform_error=" << format_g(err);
    if (trace.final.is_pole_kind()) {
      const bool neg = std::all_of(params.begin(), params.end(), [](double p) { return p < 0.0; });
      os << " poles_negative=" << (neg ? "yes" : "no");
    }
    if (!trace.flags.empty())
      os << " flags=" << trace.flags.size();
    os << "\n";
  }
  if (cfg.command == Command::PrecondDemo) {
    os << "mu        K         n   poles  error      iters  exact  delta  krylov  status\n";
    for (const auto& row : r.sweep) {
      char line[256];
      std::snprintf(line, sizeof line, "%-9.3g %-9.3g %-3d %-6d %-10.3e %-6d %-6d %-6d %-7s %s\n",
                    row.mu, row.K, row.n, row.n_poles, row.uniform_error, row.iterations,
                    row.exact_iterations, row.delta, row.krylov.c_str(), row.status.c_str());
      os << line;
    }
  }
  return os.str();
}

} // namespace

extern "C" {

const char* rg_version(void) { return "0.1.0"; }

const char* rg_last_error(void) { return g_last_error.c_str(); }

const char* rg_status_name(rg_status status) {
  switch (status) {
  case RG_OK:
    return "ok";
  case RG_ERR_INVALID_ARGUMENT:
    return "invalid argument";
  case RG_ERR_DOMAIN:
    return "domain error";
  case RG_ERR_NUMERICAL:
    return "numerical failure";
  case RG_ERR_IO:
    return "i/o error";
  case RG_ERR_CONFIG:
    return "config error";
  case RG_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

void rg_string_free(char* s) { std::free(s); }

// ---- targets ---------------------------------------------------------------

rg_status rg_target_inverse_power(double alpha, rg_target** out) {
  RG_REQUIRE(out, "null output pointer");
  return guard([&] { *out = new rg_target{TargetFunction::inverse_power(alpha)}; });
}

rg_status rg_target_two_term(double s, double t, double alpha, double beta, rg_target** out) {
  RG_REQUIRE(out, "null output pointer");
  return guard([&] { *out = new rg_target{TargetFunction::two_term(s, t, alpha, beta)}; });
}

rg_status rg_target_rescaled_interface(double mu, double K, double c, rg_target** out) {
  RG_REQUIRE(out, "null output pointer");
  return guard([&] { *out = new rg_target{TargetFunction::rescaled_interface(mu, K, c)}; });
}

rg_status rg_target_custom(rg_scalar_fn fn, void* user, rg_target** out) {
  RG_REQUIRE(out && fn, "null argument");
  return guard([&] {
    *out = new rg_target{TargetFunction::custom([fn, user](double z) { return fn(z, user); })};
  });
}

rg_status rg_target_eval(const rg_target* f, double z, double* out) {
  RG_REQUIRE(f && out, "null argument");
  return guard([&] { *out = f->f(z); });
}

void rg_target_free(rg_target* f) { delete f; }

// ---- dictionaries ----------------------------------------------------------

rg_status rg_dictionary_normalized_pole(double left, double right, double fit_lo, double fit_hi,
                                        rg_dictionary** out) {
  RG_REQUIRE(out, "null output pointer");
  return guard([&] {
    *out = new rg_dictionary{
        DictionarySpec::normalized_pole(PoleWindow(left, right), Interval(fit_lo, fit_hi))};
  });
}

rg_status rg_dictionary_plain_pole(double left, double right, rg_dictionary** out) {
  RG_REQUIRE(out, "null output pointer");
  return guard(
      [&] { *out = new rg_dictionary{DictionarySpec::plain_pole(PoleWindow(left, right))}; });
}

rg_status rg_dictionary_negative_power(double eta_lo, double eta_hi, rg_dictionary** out) {
  RG_REQUIRE(out, "null output pointer");
  return guard([&] { *out = new rg_dictionary{DictionarySpec::negative_power(eta_lo, eta_hi)}; });
}

void rg_dictionary_free(rg_dictionary* d) { delete d; }

// ---- greedy runs -----------------------------------------------------------

void rg_options_init(rg_options* o) {
  if (!o)
    return;
  const PsoConfig p;
  *o = rg_options{};
  o->fit_lo = o->eval_lo = 1e-6;
  o->fit_hi = o->eval_hi = 1.0;
  o->n = 12;
  o->mode = RG_MODE_FINAL_ONLY;
  o->target_error = 0.0;
  o->swarm_size = p.swarm_size;
  o->pso_iterations = p.iterations;
  o->inertia = p.inertia;
  o->cognitive = p.cognitive;
  o->social = p.social;
  o->seed = 0;
  o->wcga_m = 100;
  o->t_exponent = 0.5;
}

rg_status rg_run_oga(const rg_target* f, const rg_dictionary* d, const rg_options* o,
                     rg_trace** out) {
  RG_REQUIRE(f && d && o && out, "null argument");
  return guard([&] {
    *out = new rg_trace{run_oga(f->f, d->d, fit_settings(*o), o->n, pso_config(*o))};
  });
}

rg_status rg_run_improved_oga(const rg_target* f, const rg_dictionary* d, const rg_options* o,
                              rg_trace** out) {
  RG_REQUIRE(f && d && o && out, "null argument");
  RG_REQUIRE(o->mode == RG_MODE_FINAL_ONLY || o->mode == RG_MODE_EVERY_STEP, "unknown mode");
  return guard([&] {
    const ImprovedMode mode =
        o->mode == RG_MODE_EVERY_STEP ? ImprovedMode::EveryStep : ImprovedMode::FinalOnly;
    *out = new rg_trace{run_improved_oga(f->f, d->d, fit_settings(*o), o->n, pso_config(*o), mode,
                                         o->target_error)};
  });
}

rg_status rg_run_wcga(const rg_target* f, const rg_dictionary* d, const rg_options* o,
                      rg_trace** out) {
  RG_REQUIRE(f && d && o && out, "null argument");
  RG_REQUIRE(o->t_exponent >= 0.0, "t_exponent must be >= 0");
  return guard([&] {
    WcgaConfig w;
    const double e = o->t_exponent;
    w.t_sequence = [e](int k) { return std::pow(static_cast<double>(k), -e); };
    w.m = o->wcga_m;
    w.max_terms = o->n;
    w.target_error = o->target_error;
    *out = new rg_trace{run_wcga(f->f, d->d, fit_settings(*o), w)};
  });
}

size_t rg_trace_iterations(const rg_trace* t) { return t ? t->t.iterations.size() : 0; }

rg_status rg_trace_iteration(const rg_trace* t, size_t j, double* param, double* uniform_error,
                             double* l2_error) {
  RG_REQUIRE(t, "null trace");
  RG_REQUIRE(j < t->t.iterations.size(), "iteration index out of range");
  const auto& it = t->t.iterations[j];
  if (param)
    *param = it.param;
  if (uniform_error)
    *uniform_error = it.uniform_error;
  if (l2_error)
    *l2_error = it.l2_error;
  return RG_OK;
}

size_t rg_trace_size(const rg_trace* t) { return t ? t->t.final.size() : 0; }

rg_status rg_trace_final(const rg_trace* t, double* params, double* coeffs, size_t cap) {
  RG_REQUIRE(t, "null trace");
  const size_t n = t->t.final.size();
  RG_REQUIRE(cap >= n, "output buffer too small");
  const auto p = t->t.final.params();
  for (size_t i = 0; i < n; ++i) {
    if (params)
      params[i] = p[i];
    if (coeffs)
      coeffs[i] = t->t.final.coeffs()[i];
  }
  return RG_OK;
}

rg_status rg_trace_eval(const rg_trace* t, double z, double* out) {
  RG_REQUIRE(t && out, "null argument");
  return guard([&] { *out = t->t.final(z); });
}

rg_status rg_trace_partial_fraction(const rg_trace* t, double* c0, double* residues, double* poles,
                                    size_t cap) {
  RG_REQUIRE(t, "null trace");
  RG_REQUIRE(cap >= t->t.final.size(), "output buffer too small");
  return guard([&] {
    const PartialFraction pf = to_partial_fraction(t->t.final);
    if (c0)
      *c0 = pf.c0;
    for (size_t i = 0; i < pf.size(); ++i) {
      if (residues)
        residues[i] = pf.residues[i];
      if (poles)
        poles[i] = pf.poles[i];
    }
  });
}

size_t rg_trace_flag_count(const rg_trace* t) { return t ? t->t.flags.size() : 0; }

const char* rg_trace_flag(const rg_trace* t, size_t i) {
  if (!t || i >= t->t.flags.size())
    return nullptr;
  return t->t.flags[i].c_str();
}

void rg_trace_free(rg_trace* t) { delete t; }

// ---- matrix functions ------------------------------------------------------

rg_status rg_apply_rational(const double* a, size_t n, const double* b, double c0,
                            const double* residues, const double* poles, size_t m, double* out) {
  RG_REQUIRE(a && b && out && n > 0, "null argument or empty matrix");
  RG_REQUIRE(m == 0 || (residues && poles), "null partial-fraction arrays");
  return guard([&] {
    const SpdMatrix spd(read_matrix(a, n));
    const Eigen::VectorXd x = apply_rational(
        spd, Eigen::Map<const Eigen::VectorXd>(b, static_cast<Eigen::Index>(n)),
        read_pf(c0, residues, poles, m));
    std::copy(x.data(), x.data() + n, out);
  });
}

rg_status rg_apply_exact(const double* a, size_t n, const double* b, const rg_target* f,
                         double* out) {
  RG_REQUIRE(a && b && f && out && n > 0, "null argument or empty matrix");
  return guard([&] {
    const SpdMatrix spd(read_matrix(a, n));
    const Eigen::VectorXd x =
        apply_exact(spd, Eigen::Map<const Eigen::VectorXd>(b, static_cast<Eigen::Index>(n)), f->f);
    std::copy(x.data(), x.data() + n, out);
  });
}

rg_status rg_operator_bound(const double* a, size_t n, const double* b, const rg_target* f,
                            double c0, const double* residues, const double* poles, size_t m,
                            double* lhs, double* rhs, int* holds) {
  RG_REQUIRE(a && b && f && n > 0, "null argument or empty matrix");
  RG_REQUIRE(m == 0 || (residues && poles), "null partial-fraction arrays");
  return guard([&] {
    const SpdMatrix spd(read_matrix(a, n));
    const OperatorBound r = check_operator_bound(
        spd, Eigen::Map<const Eigen::VectorXd>(b, static_cast<Eigen::Index>(n)), f->f,
        read_pf(c0, residues, poles, m));
    if (lhs)
      *lhs = r.lhs;
    if (rhs)
      *rhs = r.rhs;
    if (holds)
      *holds = r.holds ? 1 : 0;
  });
}

// ---- experiments -----------------------------------------------------------

rg_status rg_experiment_parse(const char* json_text, rg_experiment** out) {
  RG_REQUIRE(json_text && out, "null argument");
  return guard([&] { *out = new rg_experiment{parse_config(json_text), std::nullopt, {}}; });
}

rg_status rg_experiment_load(const char* path, rg_experiment** out) {
  RG_REQUIRE(path && out, "null argument");
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return fail(RG_ERR_IO, std::string("cannot read ") + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return rg_experiment_parse(ss.str().c_str(), out);
}

rg_status rg_experiment_set_command(rg_experiment* e, const char* command) {
  RG_REQUIRE(e && command, "null argument");
  const std::string c = command;
  if (c == "approx")
    e->cfg.command = Command::Approx;
  else if (c == "compare")
    e->cfg.command = Command::Compare;
  else if (c == "precond-demo")
    e->cfg.command = Command::PrecondDemo;
  else
    return fail(RG_ERR_CONFIG, "command: unknown value '" + c + "'");
  return RG_OK;
}

rg_status rg_experiment_set_seed(rg_experiment* e, uint64_t seed) {
  RG_REQUIRE(e, "null experiment");
  e->cfg.seed = seed;
  e->cfg.pso.seed = seed;
  return RG_OK;
}

rg_status rg_experiment_set_output_dir(rg_experiment* e, const char* dir) {
  RG_REQUIRE(e && dir && *dir, "null or empty output directory");
  e->cfg.output_dir = dir;
  return RG_OK;
}

rg_status rg_experiment_to_json(const rg_experiment* e, char** out) {
  RG_REQUIRE(e && out, "null argument");
  return guard([&] { *out = dup_string(serialize_config(e->cfg)); });
}

rg_status rg_experiment_run(rg_experiment* e) {
  RG_REQUIRE(e, "null experiment");
  e->result.reset();
  e->files.clear();
  return guard([&] {
    ExperimentResult r = run_experiment(e->cfg);
    e->files = write_report(e->cfg, r);
    e->result = std::move(r);
  });
}

size_t rg_experiment_file_count(const rg_experiment* e) { return e ? e->files.size() : 0; }

const char* rg_experiment_file(const rg_experiment* e, size_t i) {
  if (!e || i >= e->files.size())
    return nullptr;
  return e->files[i].c_str();
}

rg_status rg_experiment_summary(const rg_experiment* e, char** out) {
  RG_REQUIRE(e && out, "null argument");
  RG_REQUIRE(e->result.has_value(), "experiment has not been run");
  return guard([&] { *out = dup_string(summarize(e->cfg, *e->result)); });
}

void rg_experiment_free(rg_experiment* e) { delete e; }

} // extern "C"
