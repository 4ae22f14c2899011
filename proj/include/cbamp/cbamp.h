/* C interface for the CB-AMP complex sparse-recovery library.
 *
 * All functions returning cbamp_status report failures through the return
 * code; cbamp_last_error() holds the most recent failure message of the
 * calling thread. Strings returned through char** are heap-allocated and
 * must be released with cbamp_string_free(). Opaque handles are destroyed
 * with their matching *_destroy function. Handles are safe to use from
 * multiple threads as long as each handle is used by one thread at a time.
 */
#ifndef CBAMP_H
#define CBAMP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef CBAMP_API
#define CBAMP_API __attribute__((visibility("default")))
#endif

typedef enum cbamp_status {
  CBAMP_OK = 0,
  CBAMP_ERROR_INVALID_ARGUMENT = 1,
  CBAMP_ERROR_DIMENSION = 2,
  CBAMP_ERROR_DIVERGED = 3,
  CBAMP_ERROR_RANGE = 4,
  CBAMP_ERROR_JSON = 5,
  CBAMP_ERROR_INTERNAL = 6
} cbamp_status;

CBAMP_API const char* cbamp_version(void);
CBAMP_API const char* cbamp_status_name(cbamp_status status);
CBAMP_API const char* cbamp_last_error(void);
CBAMP_API void cbamp_string_free(char* s);

/* -------- problem instances -------- */

typedef struct cbamp_problem cbamp_problem;

/* Seeded recipe for one recovery task; matches the JSON wire format
 * {"m","n","gamma","sigma2","prior":{"rho","mu_re","mu_im","tau"},
 *  "seed_x","seed_a","seed_w"}. */
typedef struct cbamp_problem_spec {
  int64_t m;
  int64_t n;
  double gamma;  /* <= 0 selects the 1/n default */
  double sigma2;
  double rho;
  double mu_re;
  double mu_im;
  double tau;
  uint64_t seed_x;
  uint64_t seed_a;
  uint64_t seed_w;
} cbamp_problem_spec;

CBAMP_API void cbamp_problem_spec_init(cbamp_problem_spec* spec);
CBAMP_API cbamp_status cbamp_problem_generate(const cbamp_problem_spec* spec,
                                              cbamp_problem** out);
CBAMP_API cbamp_status cbamp_problem_from_json(const char* json_text,
                                               cbamp_problem** out);
CBAMP_API cbamp_status cbamp_problem_to_json(const cbamp_problem* problem,
                                             char** json_out);
CBAMP_API int64_t cbamp_problem_m(const cbamp_problem* problem);
CBAMP_API int64_t cbamp_problem_n(const cbamp_problem* problem);
CBAMP_API void cbamp_problem_destroy(cbamp_problem* problem);

/* -------- solvers -------- */

typedef enum cbamp_algo {
  CBAMP_ALGO_CBAMP = 0,
  CBAMP_ALGO_EP = 1,
  CBAMP_ALGO_REAL_AMP = 2
} cbamp_algo;

typedef struct cbamp_solver_options {
  int32_t max_iters;
  double tol;           /* relative-change stop; 0 disables */
  double sigma2_floor;
  double damping;       /* 0 = paper-exact */
  int32_t onsager;      /* 0 deletes the Onsager reaction term */
} cbamp_solver_options;

CBAMP_API void cbamp_solver_options_init(cbamp_solver_options* opts);

typedef struct cbamp_solution cbamp_solution;

/* A solve that hits nonfinite state mid-run still returns CBAMP_OK with a
 * solution flagged diverged, carrying the last finite trace. */
CBAMP_API cbamp_status cbamp_solve(const cbamp_problem* problem,
                                   cbamp_algo algo,
                                   const cbamp_solver_options* opts,
                                   cbamp_solution** out);
CBAMP_API int32_t cbamp_solution_diverged(const cbamp_solution* sol);
CBAMP_API int32_t cbamp_solution_iterations(const cbamp_solution* sol);
CBAMP_API double cbamp_solution_final_mse(const cbamp_solution* sol);
CBAMP_API int64_t cbamp_solution_size(const cbamp_solution* sol);
CBAMP_API void cbamp_solution_estimate(const cbamp_solution* sol, double* re,
                                       double* im);
/* Trace CSV: header comments then t,mse,mean_nu,mean_Va,residual rows. */
CBAMP_API cbamp_status cbamp_solution_trace_csv(const cbamp_solution* sol,
                                                char** csv_out);
CBAMP_API void cbamp_solution_destroy(cbamp_solution* sol);

/* -------- state evolution -------- */

typedef struct cbamp_se_params {
  double alpha;
  double gamma_n;  /* gamma * N; 1 when gamma = 1/N */
  double sigma2;
  double rho;
  double mu_re;
  double mu_im;
  double tau;
  int32_t mc_samples;
  uint64_t seed;
  int32_t threads;  /* 0 = auto, capped by CBAMP_THREADS */
} cbamp_se_params;

CBAMP_API void cbamp_se_params_init(cbamp_se_params* params);
/* E_out and V_out receive iters values (t = 1..iters; t = 1 is the prior
 * variance initialization). */
CBAMP_API cbamp_status cbamp_se_run(const cbamp_se_params* params,
                                    int32_t iters, double* E_out,
                                    double* V_out);
CBAMP_API cbamp_status cbamp_se_run_csv(const cbamp_se_params* params,
                                        int32_t iters, char** csv_out);

/* -------- experiments (JSON config in, CSV out) -------- */

/* Config keys (snake_case): experiment, n, alpha, rho, mu_re, mu_im, tau,
 * sigma2, gamma, iters, trials, base_seed, algos, out, se_samples, threads.
 * alpha and rho accept a number, a "start:stop:step" string, or an array. */
CBAMP_API cbamp_status cbamp_mse_curve_run(const char* config_json,
                                           char** csv_out);
CBAMP_API cbamp_status cbamp_phase_run(const char* config_json,
                                       char** grid_csv_out,
                                       char** boundary_csv_out);
/* Keys: rho (grid), tol, alpha_lo, alpha_hi, iters, success_mse, gamma_n,
 * mc_samples, seed, mu_re, mu_im, tau, threads. */
CBAMP_API cbamp_status cbamp_se_boundary_run(const char* config_json,
                                             char** csv_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CBAMP_H */
