/*
 * lagrg: renormalization dynamics on Laguerre entire functions.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through this API; every fallible call returns a lagrg_status
 * and writes results through out-parameters. lagrg_last_error() returns a
 * thread-local message for the most recent failure.
 */
#ifndef LAGRG_H
#define LAGRG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lagrg_status {
    LAGRG_OK = 0,
    LAGRG_ERR_INVALID_ARGUMENT,
    LAGRG_ERR_ZERO_CONSTANT_TERM,
    LAGRG_ERR_DIVERGENT_SUM,
    LAGRG_ERR_QUADRATURE_NONCONVERGENT,
    LAGRG_ERR_SINGULAR_TIME,
    LAGRG_ERR_NOT_NORMALIZED,
    LAGRG_ERR_DEGENERATE_INPUT,
    LAGRG_ERR_TRUNCATION_FAILURE,
    LAGRG_ERR_DOMAIN_EXIT,
    LAGRG_ERR_SINGULAR_ORBIT,
    LAGRG_ERR_NO_BRACKET,
    LAGRG_ERR_UNDECIDED,
    LAGRG_ERR_CORRIDOR_VIOLATION,
    LAGRG_ERR_MASS_LEAK,
    LAGRG_ERR_CONFIG_INVALID,
    LAGRG_ERR_IO,
    LAGRG_ERR_INTERNAL
} lagrg_status;

const char* lagrg_status_name(lagrg_status s);
const char* lagrg_last_error(void);

/* ------------------------------------------------------------------ */
/* parameters                                                          */
/* ------------------------------------------------------------------ */

#define LAGRG_PRECISION_DOUBLE 0
#define LAGRG_PRECISION_EXTENDED 1

typedef struct lagrg_params {
    double theta;
    double lambda;
    int delta;
    double beta; /* coupling; tau = beta (delta^lambda - 1) */
    int K;
    int n_max;
    double tol;
    double quad_tol;
    int precision; /* LAGRG_PRECISION_* */
} lagrg_params;

/* sensible defaults: theta 0, lambda 0.25, delta 2, beta 1, K 64, n_max 60 */
void lagrg_params_init(lagrg_params* p);

double lagrg_tau(const lagrg_params* p);
double lagrg_theta_from_dimension(int N, double d);

/* ------------------------------------------------------------------ */
/* truncated series                                                    */
/* ------------------------------------------------------------------ */

typedef struct lagrg_series lagrg_series;

lagrg_status lagrg_series_create(int K, const double* coeffs, size_t ncoeffs, lagrg_series** out);
lagrg_status lagrg_series_exponential(double rate, int K, lagrg_series** out);
void lagrg_series_free(lagrg_series* s);
int lagrg_series_degree(const lagrg_series* s);
double lagrg_series_tail(const lagrg_series* s);
lagrg_status lagrg_series_coeffs(const lagrg_series* s, double* out, size_t n);
lagrg_status lagrg_series_eval(const lagrg_series* s, double z, double* out);

lagrg_status lagrg_scale_argument(const lagrg_series* f, double s, lagrg_series** out);
lagrg_status lagrg_mul(const lagrg_series* f, const lagrg_series* g, lagrg_series** out);
lagrg_status lagrg_pow_integer(const lagrg_series* f, long p, lagrg_series** out);
/* phi[k-1] = (D^k log f)(0), k = 1..upto */
lagrg_status lagrg_log_derivatives(const lagrg_series* f, int upto, double* phi);
lagrg_status lagrg_norm_b(const lagrg_series* f, double b, double* value, int* argmax);

/* ------------------------------------------------------------------ */
/* factored Laguerre seeds                                             */
/* ------------------------------------------------------------------ */

typedef struct lagrg_seed lagrg_seed;

lagrg_status lagrg_seed_create(double C, int m, double alpha, const double* gammas, size_t ngammas,
                               lagrg_seed** out);
void lagrg_seed_free(lagrg_seed* g);
lagrg_status lagrg_seed_moments(const lagrg_seed* g, int kmax, double* out);
/* hi is +inf when alpha = 0 */
lagrg_status lagrg_seed_coupling_interval(const lagrg_seed* g, int delta, double lambda, double* lo,
                                          double* hi);
lagrg_status lagrg_seed_in_class(const lagrg_seed* g, double theta, int delta, double lambda,
                                 int* member, double* sigma, double* Phi1, double* Phi2);
lagrg_status lagrg_seed_to_series(const lagrg_seed* g, int K, lagrg_series** out);

/* ------------------------------------------------------------------ */
/* semigroup                                                           */
/* ------------------------------------------------------------------ */

lagrg_status lagrg_delta_theta(const lagrg_series* f, double theta, lagrg_series** out);
lagrg_status lagrg_heat_apply(const lagrg_series* f, double theta, double t, lagrg_series** out);
lagrg_status lagrg_w_theta(double z, double theta, double tol, double* out);

typedef double (*lagrg_scalar_fn)(double x, void* ctx);
lagrg_status lagrg_heat_apply_integral(lagrg_scalar_fn g, void* ctx, double theta, double t,
                                       double z, double tol, double* out);
lagrg_status lagrg_shift_identity(const lagrg_series* h, double v, double u, double theta,
                                  double* rate, lagrg_series** h_u);

/* ------------------------------------------------------------------ */
/* dynamics                                                            */
/* ------------------------------------------------------------------ */

#define LAGRG_ORBIT_T 0
#define LAGRG_ORBIT_Q 1
#define LAGRG_ORBIT_Q_TILDE 2

lagrg_status lagrg_step_t(const lagrg_series* f, const lagrg_params* p, double t,
                          lagrg_series** out);
lagrg_status lagrg_step_q(const lagrg_series* g, const lagrg_params* p, lagrg_series** out);
lagrg_status lagrg_step_q_tilde(const lagrg_series* g, int n, const lagrg_params* p,
                                lagrg_series** out);

typedef struct lagrg_orbit lagrg_orbit;

typedef struct lagrg_orbit_record {
    int n;
    double log_C;
    double phi1;
    double phi2;
    double nu;    /* meaningful only when nu_valid */
    double kappa; /* delta^{-lambda} nu */
    int nu_valid;
    unsigned flags; /* bits 0..5: main estimates; bit 6: estimates evaluated */
    double tail;
} lagrg_orbit_record;

/* n_steps < 0 runs to p->n_max with fixed-point early stopping */
lagrg_status lagrg_run_orbit(const lagrg_seed* seed, const lagrg_params* p, int variant,
                             int n_steps, lagrg_orbit** out);
void lagrg_orbit_free(lagrg_orbit* o);
size_t lagrg_orbit_length(const lagrg_orbit* o);
lagrg_status lagrg_orbit_record_at(const lagrg_orbit* o, size_t i, lagrg_orbit_record* out);
lagrg_status lagrg_orbit_series_at(const lagrg_orbit* o, size_t i, lagrg_series** out);

/* ------------------------------------------------------------------ */
/* critical structure                                                  */
/* ------------------------------------------------------------------ */

lagrg_status lagrg_exponential_orbit_oracle(double C0, double alpha, const lagrg_params* p, int n,
                                            double* log_C, double* u);
lagrg_status lagrg_c_of_tau(const lagrg_params* p, double alpha, int terms, double* out);

#define LAGRG_FP_TRIVIAL 0
#define LAGRG_FP_CRITICAL 1

lagrg_status lagrg_linearization_eigenvalues(int which, const lagrg_params* p, int kmax,
                                             double* out /* kmax+1 entries */);
lagrg_status lagrg_numeric_linearization_spectrum(int which, const lagrg_params* p, int kmax,
                                                  double* out /* kmax+1 entries */);
lagrg_status lagrg_linearized_step(int which, const lagrg_series* h, const lagrg_params* p,
                                   lagrg_series** out);
lagrg_status lagrg_critical_profile(const lagrg_params* p, double t, double z, double* out);

typedef struct lagrg_critical lagrg_critical;

typedef struct lagrg_trace_entry {
    double beta;
    int verdict; /* 0 sub, 1 super, 2 undecided */
    int exit_step;
} lagrg_trace_entry;

lagrg_status lagrg_find_beta_star(const lagrg_seed* seed, const lagrg_params* p, double beta_tol,
                                  lagrg_critical** out);
void lagrg_critical_free(lagrg_critical* c);
double lagrg_critical_beta_star(const lagrg_critical* c);
double lagrg_critical_tau_star(const lagrg_critical* c);
double lagrg_critical_zeta_star(const lagrg_critical* c);
double lagrg_critical_zeta_minus(const lagrg_critical* c);
void lagrg_critical_bracket(const lagrg_critical* c, double* lo, double* hi);
size_t lagrg_critical_trace_length(const lagrg_critical* c);
lagrg_status lagrg_critical_trace_at(const lagrg_critical* c, size_t i, lagrg_trace_entry* out);

lagrg_status lagrg_find_zeta_star(const lagrg_seed* seed, double beta, const lagrg_params* p,
                                  int corridor_n, double* out);

/* ------------------------------------------------------------------ */
/* probabilistic layer                                                 */
/* ------------------------------------------------------------------ */

#define LAGRG_MEASURE_ABNORMAL 0
#define LAGRG_MEASURE_CLASSICAL 1

#define LAGRG_LIMIT_DEGENERATE 0
#define LAGRG_LIMIT_GAUSSIAN 1
#define LAGRG_LIMIT_DIVERGENT 2

/* E|Y|^2 = 2N f'(0) for a normalized radial transform profile */
lagrg_status lagrg_second_moment(const lagrg_series* f, int N, double* out);

/* one step of the N = 1 grid recursion; density arrays have n entries on the
 * uniform grid y0 + i h and the result is written in place over out */
lagrg_status lagrg_measure_step(const double* density, size_t n, double y0, double h,
                                const lagrg_params* p, int N, double d, int variant, int level,
                                double* out);

typedef struct lagrg_limit_verdict {
    int kind; /* LAGRG_LIMIT_* */
    int has_variance;
    double variance;
    double tau;
    double tau_star;
    double phi_tilde_limit;
    double phi_tilde_bound;
} lagrg_limit_verdict;

lagrg_status lagrg_limit_verdict(const lagrg_seed* seed, const lagrg_params* p, int N, double d,
                                 int variant, lagrg_limit_verdict* out);

/* ------------------------------------------------------------------ */
/* experiment runner                                                   */
/* ------------------------------------------------------------------ */

/* Parse a JSON experiment config, run its command, write artifacts.
 * out_dir_override and command_override may be NULL; precision_override is
 * -1 to keep the configured mode. On success *files (if non-NULL) receives a
 * '\n'-separated list of written paths to be freed with lagrg_string_free. */
lagrg_status lagrg_run_config(const char* json_text, const char* out_dir_override,
                              const char* command_override, int precision_override,
                              int max_iter_override, char** files);
void lagrg_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* LAGRG_H */
