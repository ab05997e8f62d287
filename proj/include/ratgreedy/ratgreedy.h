/* SPDX-License-Identifier: Apache-2.0 */
#ifndef RATGREEDY_H
#define RATGREEDY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RATGREEDY_BUILD)
#define RG_API __declspec(dllexport)
#else
#define RG_API __declspec(dllimport)
#endif
#else
#define RG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure rg_last_error() holds a
 * message for the calling thread until its next failing call. */
typedef enum rg_status {
  RG_OK = 0,
  RG_ERR_INVALID_ARGUMENT = 1, /* null handle, bad index, short buffer */
  RG_ERR_DOMAIN = 2,           /* interval, window or parameter out of range */
  RG_ERR_NUMERICAL = 3,        /* quadrature, factorization, singular basis */
  RG_ERR_IO = 4,
  RG_ERR_CONFIG = 5, /* schema violation in an experiment document */
  RG_ERR_INTERNAL = 6
} rg_status;

typedef enum rg_mode { RG_MODE_FINAL_ONLY = 0, RG_MODE_EVERY_STEP = 1 } rg_mode;

typedef struct rg_target rg_target;
typedef struct rg_dictionary rg_dictionary;
typedef struct rg_trace rg_trace;
typedef struct rg_experiment rg_experiment;

typedef double (*rg_scalar_fn)(double z, void* user);

RG_API const char* rg_version(void);
RG_API const char* rg_last_error(void);
RG_API const char* rg_status_name(rg_status status);
/* Frees strings returned through char** out-parameters. */
RG_API void rg_string_free(char* s);

/* ---- targets ---------------------------------------------------------- */

RG_API rg_status rg_target_inverse_power(double alpha, rg_target** out);
/* (s z^alpha + t z^beta)^-1 */
RG_API rg_status rg_target_two_term(double s, double t, double alpha, double beta, rg_target** out);
RG_API rg_status rg_target_rescaled_interface(double mu, double K, double c, rg_target** out);
/* `fn` must stay callable with `user` for the lifetime of the target. */
RG_API rg_status rg_target_custom(rg_scalar_fn fn, void* user, rg_target** out);
RG_API rg_status rg_target_eval(const rg_target* f, double z, double* out);
RG_API void rg_target_free(rg_target* f);

/* ---- dictionaries ----------------------------------------------------- */

/* Poles in [left, right] with left < right < 0, unit L2 norm on [fit_lo, fit_hi]. */
RG_API rg_status rg_dictionary_normalized_pole(double left, double right, double fit_lo,
                                               double fit_hi, rg_dictionary** out);
RG_API rg_status rg_dictionary_plain_pole(double left, double right, rg_dictionary** out);
/* z^-eta with 0 < eta_lo < eta_hi < 1. */
RG_API rg_status rg_dictionary_negative_power(double eta_lo, double eta_hi, rg_dictionary** out);
RG_API void rg_dictionary_free(rg_dictionary* d);

/* ---- greedy runs ------------------------------------------------------ */

typedef struct rg_options {
  double fit_lo, fit_hi;
  double eval_lo, eval_hi;
  int n; /* greedy steps; maximum number of terms for WCGA */
  rg_mode mode;
  double target_error; /* 0 disables early stopping */
  int swarm_size;
  int pso_iterations;
  double inertia, cognitive, social;
  uint64_t seed;
  int wcga_m;        /* candidate grid has wcga_m + 1 points */
  double t_exponent; /* t_k = k^-t_exponent */
} rg_options;

/* Defaults: [1e-6, 1] for both intervals, n = 12, final-only, PSO 40 x 200,
 * seed 0, m = 100, t_k = 1/sqrt(k). */
RG_API void rg_options_init(rg_options* opts);

RG_API rg_status rg_run_oga(const rg_target* f, const rg_dictionary* d, const rg_options* opts,
                            rg_trace** out);
RG_API rg_status rg_run_improved_oga(const rg_target* f, const rg_dictionary* d,
                                     const rg_options* opts, rg_trace** out);
RG_API rg_status rg_run_wcga(const rg_target* f, const rg_dictionary* d, const rg_options* opts,
                             rg_trace** out);

RG_API size_t rg_trace_iterations(const rg_trace* t);
/* j is 0-based; any output pointer may be NULL. */
RG_API rg_status rg_trace_iteration(const rg_trace* t, size_t j, double* param,
                                    double* uniform_error, double* l2_error);
/* Number of terms of the final approximant. */
RG_API size_t rg_trace_size(const rg_trace* t);
RG_API rg_status rg_trace_final(const rg_trace* t, double* params, double* coeffs, size_t cap);
RG_API rg_status rg_trace_eval(const rg_trace* t, double z, double* out);
/* Pole-kind approximants only; residues include normalization factors. */
RG_API rg_status rg_trace_partial_fraction(const rg_trace* t, double* c0, double* residues,
                                           double* poles, size_t cap);
RG_API size_t rg_trace_flag_count(const rg_trace* t);
RG_API const char* rg_trace_flag(const rg_trace* t, size_t i);
RG_API void rg_trace_free(rg_trace* t);

/* ---- matrix functions (dense, row-major n x n SPD matrix) --------------- */

RG_API rg_status rg_apply_rational(const double* a, size_t n, const double* b, double c0,
                                   const double* residues, const double* poles, size_t m,
                                   double* out);
RG_API rg_status rg_apply_exact(const double* a, size_t n, const double* b, const rg_target* f,
                                double* out);
/* |f(A)b - R(A)b| <= max|f - R| over [lambda_min, lambda_max] * |b|. */
RG_API rg_status rg_operator_bound(const double* a, size_t n, const double* b, const rg_target* f,
                                   double c0, const double* residues, const double* poles,
                                   size_t m, double* lhs, double* rhs, int* holds);

/* ---- experiments (JSON documents) ------------------------------------- */

RG_API rg_status rg_experiment_parse(const char* json_text, rg_experiment** out);
RG_API rg_status rg_experiment_load(const char* path, rg_experiment** out);
/* "approx", "compare" or "precond-demo". */
RG_API rg_status rg_experiment_set_command(rg_experiment* e, const char* command);
RG_API rg_status rg_experiment_set_seed(rg_experiment* e, uint64_t seed);
RG_API rg_status rg_experiment_set_output_dir(rg_experiment* e, const char* dir);
/* Normalized document with every default filled in. */
RG_API rg_status rg_experiment_to_json(const rg_experiment* e, char** out);
/* Runs and writes the report files; partial files are removed on failure. */
RG_API rg_status rg_experiment_run(rg_experiment* e);
RG_API size_t rg_experiment_file_count(const rg_experiment* e);
RG_API const char* rg_experiment_file(const rg_experiment* e, size_t i);
/* Human-readable digest of the last run. */
RG_API rg_status rg_experiment_summary(const rg_experiment* e, char** out);
RG_API void rg_experiment_free(rg_experiment* e);

#ifdef __cplusplus
}
#endif

#endif /* RATGREEDY_H */
