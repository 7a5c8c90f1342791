#include "lagrg.h"

#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/critical.hpp"
#include "core/dynamics.hpp"
#include "core/laguerre.hpp"
#include "core/limits.hpp"
#include "core/semigroup.hpp"
#include "core/series.hpp"

using namespace lagrg;

struct lagrg_series {
    Series<double> s;
};
struct lagrg_seed {
    LaguerreFactored g;
};
struct lagrg_orbit {
    std::vector<OrbitRecordD> records;
};
struct lagrg_critical {
    CriticalResult res;
};

namespace {

thread_local std::string g_last_error;

lagrg_status map_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return LAGRG_ERR_INVALID_ARGUMENT;
        case ErrorCode::ZeroConstantTerm: return LAGRG_ERR_ZERO_CONSTANT_TERM;
        case ErrorCode::DivergentSum: return LAGRG_ERR_DIVERGENT_SUM;
        case ErrorCode::QuadratureNonconvergent: return LAGRG_ERR_QUADRATURE_NONCONVERGENT;
        case ErrorCode::SingularTime: return LAGRG_ERR_SINGULAR_TIME;
        case ErrorCode::NotNormalized: return LAGRG_ERR_NOT_NORMALIZED;
        case ErrorCode::DegenerateInput: return LAGRG_ERR_DEGENERATE_INPUT;
        case ErrorCode::TruncationFailure: return LAGRG_ERR_TRUNCATION_FAILURE;
        case ErrorCode::DomainExit: return LAGRG_ERR_DOMAIN_EXIT;
        case ErrorCode::SingularOrbit: return LAGRG_ERR_SINGULAR_ORBIT;
        case ErrorCode::NoBracket: return LAGRG_ERR_NO_BRACKET;
        case ErrorCode::Undecided: return LAGRG_ERR_UNDECIDED;
        case ErrorCode::CorridorViolation: return LAGRG_ERR_CORRIDOR_VIOLATION;
        case ErrorCode::MassLeak: return LAGRG_ERR_MASS_LEAK;
        case ErrorCode::ConfigInvalid: return LAGRG_ERR_CONFIG_INVALID;
        case ErrorCode::IoError: return LAGRG_ERR_IO;
    }
    return LAGRG_ERR_INTERNAL;
}

template <class F>
lagrg_status guard(F&& body) {
    try {
        body();
        return LAGRG_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LAGRG_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return LAGRG_ERR_INTERNAL;
    }
}

EvolutionParams convert(const lagrg_params* p) {
    if (!p) fail(ErrorCode::InvalidArgument, "capi", "params is null");
    EvolutionParams e;
    e.theta = p->theta;
    e.lambda = p->lambda;
    e.delta = p->delta;
    e.beta = p->beta;
    e.K = p->K;
    e.n_max = p->n_max;
    e.tol = p->tol;
    e.quad_tol = p->quad_tol;
    e.precision = p->precision == LAGRG_PRECISION_EXTENDED ? Precision::ExtendedPrec
                                                           : Precision::Double;
    return e;
}

template <class T>
void require(const T* ptr, const char* name) {
    if (!ptr) fail(ErrorCode::InvalidArgument, "capi", std::string(name) + " is null");
}

lagrg_series* wrap(Series<double>&& s) { return new lagrg_series{std::move(s)}; }

}  // namespace

extern "C" {

const char* lagrg_status_name(lagrg_status s) {
    switch (s) {
        case LAGRG_OK: return "ok";
        case LAGRG_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case LAGRG_ERR_ZERO_CONSTANT_TERM: return "ZeroConstantTerm";
        case LAGRG_ERR_DIVERGENT_SUM: return "DivergentSum";
        case LAGRG_ERR_QUADRATURE_NONCONVERGENT: return "QuadratureNonconvergent";
        case LAGRG_ERR_SINGULAR_TIME: return "SingularTime";
        case LAGRG_ERR_NOT_NORMALIZED: return "NotNormalized";
        case LAGRG_ERR_DEGENERATE_INPUT: return "DegenerateInput";
        case LAGRG_ERR_TRUNCATION_FAILURE: return "TruncationFailure";
        case LAGRG_ERR_DOMAIN_EXIT: return "DomainExit";
        case LAGRG_ERR_SINGULAR_ORBIT: return "SingularOrbit";
        case LAGRG_ERR_NO_BRACKET: return "NoBracket";
        case LAGRG_ERR_UNDECIDED: return "Undecided";
        case LAGRG_ERR_CORRIDOR_VIOLATION: return "CorridorViolation";
        case LAGRG_ERR_MASS_LEAK: return "MassLeak";
        case LAGRG_ERR_CONFIG_INVALID: return "ConfigInvalid";
        case LAGRG_ERR_IO: return "IoError";
        case LAGRG_ERR_INTERNAL: return "Internal";
    }
    return "Unknown";
}

const char* lagrg_last_error(void) { return g_last_error.c_str(); }

void lagrg_params_init(lagrg_params* p) {
    if (!p) return;
    p->theta = 0.0;
    p->lambda = 0.25;
    p->delta = 2;
    p->beta = 1.0;
    p->K = 64;
    p->n_max = 60;
    p->tol = 1e-9;
    p->quad_tol = 1e-10;
    p->precision = LAGRG_PRECISION_DOUBLE;
}

double lagrg_tau(const lagrg_params* p) { return p ? convert(p).tau() : 0.0; }

double lagrg_theta_from_dimension(int N, double d) { return theta_from_dimension(N, d); }

/* ---- series ---- */

lagrg_status lagrg_series_create(int K, const double* coeffs, size_t ncoeffs, lagrg_series** out) {
    return guard([&] {
        require(out, "out");
        if (K < 0 || ncoeffs != static_cast<size_t>(K) + 1)
            fail(ErrorCode::InvalidArgument, "capi.series_create", "need K+1 coefficients");
        require(coeffs, "coeffs");
        Series<double> s(K);
        for (size_t i = 0; i < ncoeffs; ++i) s.c[i] = coeffs[i];
        check_finite(s, "capi.series_create");
        *out = wrap(std::move(s));
    });
}

lagrg_status lagrg_series_exponential(double rate, int K, lagrg_series** out) {
    return guard([&] {
        require(out, "out");
        *out = wrap(exponential_series(rate, K));
    });
}

void lagrg_series_free(lagrg_series* s) { delete s; }

int lagrg_series_degree(const lagrg_series* s) { return s ? s->s.K : -1; }

double lagrg_series_tail(const lagrg_series* s) { return s ? s->s.tail : 0.0; }

lagrg_status lagrg_series_coeffs(const lagrg_series* s, double* out, size_t n) {
    return guard([&] {
        require(s, "series");
        require(out, "out");
        if (n < s->s.c.size())
            fail(ErrorCode::InvalidArgument, "capi.series_coeffs", "buffer too small");
        for (size_t i = 0; i < s->s.c.size(); ++i) out[i] = s->s.c[i];
    });
}

lagrg_status lagrg_series_eval(const lagrg_series* s, double z, double* out) {
    return guard([&] {
        require(s, "series");
        require(out, "out");
        *out = eval(s->s, z);
    });
}

lagrg_status lagrg_scale_argument(const lagrg_series* f, double s, lagrg_series** out) {
    return guard([&] {
        require(f, "f");
        require(out, "out");
        *out = wrap(scale_argument(f->s, s));
    });
}

lagrg_status lagrg_mul(const lagrg_series* f, const lagrg_series* g, lagrg_series** out) {
    return guard([&] {
        require(f, "f");
        require(g, "g");
        require(out, "out");
        *out = wrap(mul(f->s, g->s));
    });
}

lagrg_status lagrg_pow_integer(const lagrg_series* f, long p, lagrg_series** out) {
    return guard([&] {
        require(f, "f");
        require(out, "out");
        *out = wrap(pow_integer(f->s, p));
    });
}

lagrg_status lagrg_log_derivatives(const lagrg_series* f, int upto, double* phi) {
    return guard([&] {
        require(f, "f");
        require(phi, "phi");
        LogDerivs<double> d = log_derivatives(f->s, upto);
        for (int k = 1; k <= upto; ++k) phi[k - 1] = d(k);
    });
}

lagrg_status lagrg_norm_b(const lagrg_series* f, double b, double* value, int* argmax) {
    return guard([&] {
        require(f, "f");
        require(value, "value");
        NormResult<double> r = norm_b(f->s, b);
        *value = r.value;
        if (argmax) *argmax = r.argmax;
    });
}

/* ---- seeds ---- */

lagrg_status lagrg_seed_create(double C, int m, double alpha, const double* gammas, size_t ngammas,
                               lagrg_seed** out) {
    return guard([&] {
        require(out, "out");
        LaguerreFactored g;
        g.C = C;
        g.m = m;
        g.alpha = alpha;
        if (ngammas > 0) {
            require(gammas, "gammas");
            g.gammas.assign(gammas, gammas + ngammas);
        }
        g.validate("capi.seed_create");
        *out = new lagrg_seed{std::move(g)};
    });
}

void lagrg_seed_free(lagrg_seed* g) { delete g; }

lagrg_status lagrg_seed_moments(const lagrg_seed* g, int kmax, double* out) {
    return guard([&] {
        require(g, "seed");
        require(out, "out");
        auto m = moments(g->g, kmax);
        for (int k = 0; k < kmax; ++k) out[k] = m[static_cast<size_t>(k)];
    });
}

lagrg_status lagrg_seed_coupling_interval(const lagrg_seed* g, int delta, double lambda, double* lo,
                                          double* hi) {
    return guard([&] {
        require(g, "seed");
        require(lo, "lo");
        require(hi, "hi");
        CouplingInterval I = coupling_interval(g->g, delta, lambda);
        *lo = I.lo;
        *hi = I.hi;
    });
}

lagrg_status lagrg_seed_in_class(const lagrg_seed* g, double theta, int delta, double lambda,
                                 int* member, double* sigma, double* Phi1, double* Phi2) {
    return guard([&] {
        require(g, "seed");
        require(member, "member");
        ClassCheck cc = in_class_lambda(g->g, theta, delta, lambda);
        *member = cc.member ? 1 : 0;
        if (sigma) *sigma = cc.k.sigma;
        if (Phi1) *Phi1 = cc.k.Phi1;
        if (Phi2) *Phi2 = cc.k.Phi2;
    });
}

lagrg_status lagrg_seed_to_series(const lagrg_seed* g, int K, lagrg_series** out) {
    return guard([&] {
        require(g, "seed");
        require(out, "out");
        *out = wrap(to_series<double>(g->g, K));
    });
}

/* ---- semigroup ---- */

lagrg_status lagrg_delta_theta(const lagrg_series* f, double theta, lagrg_series** out) {
    return guard([&] {
        require(f, "f");
        require(out, "out");
        *out = wrap(delta_theta(f->s, theta));
    });
}

lagrg_status lagrg_heat_apply(const lagrg_series* f, double theta, double t, lagrg_series** out) {
    return guard([&] {
        require(f, "f");
        require(out, "out");
        *out = wrap(heat_apply(f->s, theta, t));
    });
}

lagrg_status lagrg_w_theta(double z, double theta, double tol, double* out) {
    return guard([&] {
        require(out, "out");
        *out = w_theta(z, theta, tol);
    });
}

lagrg_status lagrg_heat_apply_integral(lagrg_scalar_fn g, void* ctx, double theta, double t,
                                       double z, double tol, double* out) {
    return guard([&] {
        require(out, "out");
        if (!g) fail(ErrorCode::InvalidArgument, "capi", "callback is null");
        *out = heat_apply_integral([g, ctx](double x) { return g(x, ctx); }, theta, t, z, tol);
    });
}

lagrg_status lagrg_shift_identity(const lagrg_series* h, double v, double u, double theta,
                                  double* rate, lagrg_series** h_u) {
    return guard([&] {
        require(h, "h");
        require(rate, "rate");
        require(h_u, "h_u");
        ShiftResult<double> r = shift_identity(h->s, v, u, theta);
        *rate = r.rate;
        *h_u = wrap(std::move(r.h_u));
    });
}

/* ---- dynamics ---- */

lagrg_status lagrg_step_t(const lagrg_series* f, const lagrg_params* p, double t,
                          lagrg_series** out) {
    return guard([&] {
        require(f, "f");
        require(out, "out");
        *out = wrap(step_T(f->s, convert(p), t));
    });
}

lagrg_status lagrg_step_q(const lagrg_series* g, const lagrg_params* p, lagrg_series** out) {
    return guard([&] {
        require(g, "g");
        require(out, "out");
        *out = wrap(step_Q(g->s, convert(p)));
    });
}

lagrg_status lagrg_step_q_tilde(const lagrg_series* g, int n, const lagrg_params* p,
                                lagrg_series** out) {
    return guard([&] {
        require(g, "g");
        require(out, "out");
        *out = wrap(step_Q_tilde(g->s, n, convert(p)));
    });
}

lagrg_status lagrg_run_orbit(const lagrg_seed* seed, const lagrg_params* p, int variant,
                             int n_steps, lagrg_orbit** out) {
    return guard([&] {
        require(seed, "seed");
        require(out, "out");
        OrbitVariant v = variant == LAGRG_ORBIT_T        ? OrbitVariant::T
                         : variant == LAGRG_ORBIT_Q      ? OrbitVariant::Q
                         : variant == LAGRG_ORBIT_Q_TILDE ? OrbitVariant::QTilde
                                                           : throw Error(ErrorCode::InvalidArgument,
                                                                         "capi", "bad variant");
        OrbitOptions oo;
        oo.n_steps = n_steps;
        *out = new lagrg_orbit{run_orbit_dispatch(seed->g, convert(p), v, oo)};
    });
}

void lagrg_orbit_free(lagrg_orbit* o) { delete o; }

size_t lagrg_orbit_length(const lagrg_orbit* o) { return o ? o->records.size() : 0; }

lagrg_status lagrg_orbit_record_at(const lagrg_orbit* o, size_t i, lagrg_orbit_record* out) {
    return guard([&] {
        require(o, "orbit");
        require(out, "out");
        if (i >= o->records.size())
            fail(ErrorCode::InvalidArgument, "capi.orbit_record", "index out of range");
        const OrbitRecordD& r = o->records[i];
        out->n = r.n;
        out->log_C = r.log_C;
        out->phi1 = r.phi1;
        out->phi2 = r.phi2;
        out->nu = r.nu;
        out->kappa = r.kappa;
        out->nu_valid = r.nu_valid ? 1 : 0;
        out->flags = r.flags;
        out->tail = r.tail;
    });
}

lagrg_status lagrg_orbit_series_at(const lagrg_orbit* o, size_t i, lagrg_series** out) {
    return guard([&] {
        require(o, "orbit");
        require(out, "out");
        if (i >= o->records.size())
            fail(ErrorCode::InvalidArgument, "capi.orbit_series", "index out of range");
        Series<double> s = o->records[i].series;
        *out = wrap(std::move(s));
    });
}

/* ---- critical ---- */

lagrg_status lagrg_exponential_orbit_oracle(double C0, double alpha, const lagrg_params* p, int n,
                                            double* log_C, double* u) {
    return guard([&] {
        require(log_C, "log_C");
        require(u, "u");
        EvolutionParams e = convert(p);
        if (e.precision == Precision::ExtendedPrec) {
            auto st = exponential_orbit_oracle<Extended>(Extended(C0), Extended(alpha), e, n);
            *log_C = to_double(st.log_C);
            *u = to_double(st.u);
        } else {
            auto st = exponential_orbit_oracle<double>(C0, alpha, e, n);
            *log_C = st.log_C;
            *u = st.u;
        }
    });
}

lagrg_status lagrg_c_of_tau(const lagrg_params* p, double alpha, int terms, double* out) {
    return guard([&] {
        require(out, "out");
        *out = c_of_tau(convert(p), alpha, terms);
    });
}

lagrg_status lagrg_linearization_eigenvalues(int which, const lagrg_params* p, int kmax,
                                             double* out) {
    return guard([&] {
        require(out, "out");
        EvolutionParams e = convert(p);
        FixedPoint fp = fixed_point(
            which == LAGRG_FP_CRITICAL ? FixedPointKind::Critical : FixedPointKind::Trivial, e);
        auto ev = linearization_eigenvalues(fp, e, kmax);
        for (int k = 0; k <= kmax; ++k) out[k] = ev[static_cast<size_t>(k)];
    });
}

lagrg_status lagrg_numeric_linearization_spectrum(int which, const lagrg_params* p, int kmax,
                                                  double* out) {
    return guard([&] {
        require(out, "out");
        EvolutionParams e = convert(p);
        FixedPoint fp = fixed_point(
            which == LAGRG_FP_CRITICAL ? FixedPointKind::Critical : FixedPointKind::Trivial, e);
        auto ev = numeric_linearization_spectrum(fp, e, kmax);
        for (int k = 0; k <= kmax; ++k) out[k] = ev[static_cast<size_t>(k)];
    });
}

lagrg_status lagrg_linearized_step(int which, const lagrg_series* h, const lagrg_params* p,
                                   lagrg_series** out) {
    return guard([&] {
        require(h, "h");
        require(out, "out");
        EvolutionParams e = convert(p);
        FixedPoint fp = fixed_point(
            which == LAGRG_FP_CRITICAL ? FixedPointKind::Critical : FixedPointKind::Trivial, e);
        *out = wrap(linearized_step(fp, h->s, e));
    });
}

lagrg_status lagrg_critical_profile(const lagrg_params* p, double t, double z, double* out) {
    return guard([&] {
        require(out, "out");
        *out = critical_profile(convert(p), t, z);
    });
}

lagrg_status lagrg_find_beta_star(const lagrg_seed* seed, const lagrg_params* p, double beta_tol,
                                  lagrg_critical** out) {
    return guard([&] {
        require(seed, "seed");
        require(out, "out");
        CriticalSearchOptions opt;
        if (beta_tol > 0.0) opt.beta_tol = beta_tol;
        *out = new lagrg_critical{find_beta_star(seed->g, convert(p), opt)};
    });
}

void lagrg_critical_free(lagrg_critical* c) { delete c; }

double lagrg_critical_beta_star(const lagrg_critical* c) { return c ? c->res.beta_star : 0.0; }
double lagrg_critical_tau_star(const lagrg_critical* c) { return c ? c->res.tau_star : 0.0; }
double lagrg_critical_zeta_star(const lagrg_critical* c) { return c ? c->res.zeta_star : 0.0; }
double lagrg_critical_zeta_minus(const lagrg_critical* c) { return c ? c->res.zeta_minus : 0.0; }

void lagrg_critical_bracket(const lagrg_critical* c, double* lo, double* hi) {
    if (!c) return;
    if (lo) *lo = c->res.bracket_lo;
    if (hi) *hi = c->res.bracket_hi;
}

size_t lagrg_critical_trace_length(const lagrg_critical* c) {
    return c ? c->res.trace.size() : 0;
}

lagrg_status lagrg_critical_trace_at(const lagrg_critical* c, size_t i, lagrg_trace_entry* out) {
    return guard([&] {
        require(c, "critical");
        require(out, "out");
        if (i >= c->res.trace.size())
            fail(ErrorCode::InvalidArgument, "capi.trace", "index out of range");
        const TraceEntry& t = c->res.trace[i];
        out->beta = t.beta;
        out->verdict = t.verdict == Verdict::Sub ? 0 : t.verdict == Verdict::Super ? 1 : 2;
        out->exit_step = t.exit_step;
    });
}

lagrg_status lagrg_find_zeta_star(const lagrg_seed* seed, double beta, const lagrg_params* p,
                                  int corridor_n, double* out) {
    return guard([&] {
        require(seed, "seed");
        require(out, "out");
        CriticalSearchOptions opt;
        if (corridor_n > 0) opt.corridor_n = corridor_n;
        *out = find_zeta_star(seed->g, beta, convert(p), opt);
    });
}

/* ---- probabilistic layer ---- */

lagrg_status lagrg_second_moment(const lagrg_series* f, int N, double* out) {
    return guard([&] {
        require(f, "f");
        require(out, "out");
        *out = second_moment(IsotropicTransform{f->s, N});
    });
}

lagrg_status lagrg_measure_step(const double* density, size_t n, double y0, double h,
                                const lagrg_params* p, int N, double d, int variant, int level,
                                double* out) {
    return guard([&] {
        require(density, "density");
        require(out, "out");
        GridDensity g;
        g.y0 = y0;
        g.h = h;
        g.p.assign(density, density + n);
        HierarchyParams hp{N, d, level};
        GridDensity r = measure_step_oracle(g, convert(p), hp,
                                            variant == LAGRG_MEASURE_CLASSICAL
                                                ? MeasureVariant::Classical
                                                : MeasureVariant::Abnormal,
                                            level);
        for (size_t i = 0; i < n; ++i) out[i] = r.p[i];
    });
}

lagrg_status lagrg_limit_verdict(const lagrg_seed* seed, const lagrg_params* p, int N, double d,
                                 int variant, lagrg_limit_verdict* out) {
    return guard([&] {
        require(seed, "seed");
        require(out, "out");
        HierarchyParams hp{N, d, 2};
        LimitVerdict v = limit_verdict(seed->g, convert(p), hp,
                                       variant == LAGRG_MEASURE_CLASSICAL
                                           ? MeasureVariant::Classical
                                           : MeasureVariant::Abnormal);
        out->kind = v.kind == LimitKind::Degenerate  ? LAGRG_LIMIT_DEGENERATE
                    : v.kind == LimitKind::Gaussian  ? LAGRG_LIMIT_GAUSSIAN
                                                     : LAGRG_LIMIT_DIVERGENT;
        out->has_variance = v.has_variance ? 1 : 0;
        out->variance = v.variance;
        out->tau = v.tau;
        out->tau_star = v.tau_star;
        out->phi_tilde_limit = v.phi_tilde_limit;
        out->phi_tilde_bound = v.phi_tilde_bound;
    });
}

/* ---- experiment runner ---- */

lagrg_status lagrg_run_config(const char* json_text, const char* out_dir_override,
                              const char* command_override, int precision_override,
                              int max_iter_override, char** files) {
    return guard([&] {
        if (!json_text) fail(ErrorCode::ConfigInvalid, "capi.run_config", "config text is null");
        ExperimentConfig cfg = parse_config(json_text);
        if (out_dir_override && *out_dir_override) cfg.out_dir = out_dir_override;
        if (command_override && *command_override) cfg.command = command_override;
        if (precision_override == LAGRG_PRECISION_DOUBLE) cfg.params.precision = Precision::Double;
        if (precision_override == LAGRG_PRECISION_EXTENDED)
            cfg.params.precision = Precision::ExtendedPrec;
        if (max_iter_override > 0) cfg.params.n_max = max_iter_override;
        auto written = run_experiment(cfg);
        if (files) {
            std::string joined;
            for (size_t i = 0; i < written.size(); ++i) {
                if (i) joined += '\n';
                joined += written[i];
            }
            char* buf = new char[joined.size() + 1];
            std::memcpy(buf, joined.c_str(), joined.size() + 1);
            *files = buf;
        }
    });
}

void lagrg_string_free(char* s) { delete[] s; }

}  // extern "C"
