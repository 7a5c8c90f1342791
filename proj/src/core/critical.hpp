#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/laguerre.hpp"

namespace lagrg {

// ---------------------------------------------------------------------------
// Exponential family C e^{uz}: closed-form orbit, the coupling threshold and
// the front-constant tuning function.
// ---------------------------------------------------------------------------

template <class R>
struct ExpOrbitState {
    R log_C;
    R u;
};

// Closed-form orbit of C0 e^{alpha z} under T at coupling tau = beta (d^l - 1):
//   u_n = alpha d^{-n l} / (1 - alpha beta (1 - d^{-n l})),
//   log C_n = d^n log C0 + log xi_n + (d-1) sum_{l<n} d^{n-1-l} log xi_l,
//   log xi_l = -theta log(1 - alpha beta (1 - d^{-l l})).
template <class R>
ExpOrbitState<R> exponential_orbit_oracle(const R& C0, const R& alpha, const EvolutionParams& p,
                                          int n) {
    using std::log;
    using std::pow;
    if (!(C0 > R(0)))
        fail(ErrorCode::InvalidArgument, "critical.exp_oracle", "C0 must be positive");
    if (n < 0) fail(ErrorCode::InvalidArgument, "critical.exp_oracle", "n must be >= 0");
    const StepConstants<R> k = StepConstants<R>::make(p);
    const R rho = alpha * k.beta;  // alpha tau / (delta^lambda - 1)
    auto xi_log = [&](int l) {
        R den = R(1) - rho * (R(1) - pow(k.inv_dl, l));
        if (!(den > R(0)))
            fail(ErrorCode::SingularOrbit, "critical.exp_oracle",
                 "u_n denominator vanished: tau beyond I(g)");
        return -k.theta * log(den);
    };
    R den_n = R(1) - rho * (R(1) - pow(k.inv_dl, n));
    if (!(den_n > R(0)))
        fail(ErrorCode::SingularOrbit, "critical.exp_oracle",
             "u_n denominator vanished: tau beyond I(g)");
    ExpOrbitState<R> out;
    out.u = alpha * pow(k.inv_dl, n) / den_n;
    R acc = n >= 1 ? xi_log(n) : R(0);
    R w = R(k.delta - 1);  // (delta-1) d^{n-1-l}, built up from l = n-1 downward
    for (int l = n - 1; l >= 1; --l) {
        acc += w * xi_log(l);
        w *= R(k.delta);
    }
    out.log_C = pow(R(k.delta), n) * log(C0) + acc;
    return out;
}

// C(tau): the front constant that keeps C_n bounded for exponential seeds,
//   log C(tau) = -(1 - 1/delta) sum_{l>=1} delta^{-l} x_l,
//   x_l = -theta log(1 - alpha beta (1 - delta^{-l lambda})),
// summed with a geometric stopping rule; C(0) = 1 and C(tau_*) = C_{2,*}.
inline double c_of_tau(const EvolutionParams& p, double alpha, int terms = 200) {
    p.validate("critical.c_of_tau");
    double rho = alpha * p.beta;
    if (rho > 1.0 + 1e-12)
        fail(ErrorCode::InvalidArgument, "critical.c_of_tau", "tau must be <= tau_* = (d^l-1)/alpha");
    if (p.theta == 0.0) return 1.0;
    double idl = 1.0 / p.delta_pow_lambda();
    double acc = 0.0;
    double dinv = 1.0 / p.delta;
    double w = dinv;
    for (int l = 1; l <= terms; ++l) {
        double den = 1.0 - rho * (1.0 - std::pow(idl, l));
        if (!(den > 0.0)) fail(ErrorCode::SingularOrbit, "critical.c_of_tau", "factor vanished");
        double x = -p.theta * std::log(den);
        acc += w * x;
        if (l > 8 && w * (x + 1.0) < 1e-18 * (std::abs(acc) + 1.0)) break;
        w *= dinv;
    }
    return std::exp(-(1.0 - dinv) * acc);
}

// ---------------------------------------------------------------------------
// Fixed points and linearization
// ---------------------------------------------------------------------------

enum class FixedPointKind { Trivial, Critical };

struct FixedPoint {
    FixedPointKind which = FixedPointKind::Trivial;
    double C_star = 1.0;
    double u_star = 0.0;
};

inline FixedPoint fixed_point(FixedPointKind which, const EvolutionParams& p) {
    FixedPoint fp;
    fp.which = which;
    if (which == FixedPointKind::Critical) {
        if (!(p.tau() > 0.0))
            fail(ErrorCode::InvalidArgument, "critical.fixed_point", "critical point needs tau > 0");
        fp.C_star = std::pow(static_cast<double>(p.delta),
                             -p.lambda * p.theta / (p.delta - 1.0));
        fp.u_star = (p.delta_pow_lambda() - 1.0) / p.tau();  // = 1/beta
    }
    return fp;
}

// Analytic spectrum: Lambda_k = delta^{-k lambda - k + 1} / (1 - u* d^{-l} tau)^{2k};
// at the critical point the denominator is delta^{-lambda}, giving
// delta^{k lambda - k + 1}.
inline std::vector<double> linearization_eigenvalues(const FixedPoint& fp, const EvolutionParams& p,
                                                     int kmax) {
    if (kmax < 0 || 2 * kmax > p.K)
        fail(ErrorCode::InvalidArgument, "critical.eigenvalues", "kmax must satisfy 0 <= kmax <= K/2");
    double d = static_cast<double>(p.delta);
    double base = 1.0 - fp.u_star * p.tau() / p.delta_pow_lambda();
    std::vector<double> out;
    out.reserve(static_cast<size_t>(kmax) + 1);
    for (int k = 0; k <= kmax; ++k)
        out.push_back(std::pow(d, -k * p.lambda - k + 1.0) / std::pow(base, 2 * k));
    return out;
}

// T'[f_*](h) = delta exp(tau Delta_theta) ((f_*^{delta-1} h)(delta^{-1-lambda} z)).
template <class R>
Series<R> linearized_step(const FixedPoint& fp, const Series<R>& h, const EvolutionParams& p) {
    const StepConstants<R> k = StepConstants<R>::make(p);
    Series<R> fstar = exponential_series(R(fp.u_star), h.K);
    for (R& x : fstar.c) x *= R(fp.C_star);
    fstar.tail *= R(fp.C_star);
    Series<R> prod = mul(pow_integer(fstar, k.delta - 1), h);
    Series<R> scaled = scale_argument(prod, k.rescale);
    Series<R> out = heat_apply(scaled, k.theta, k.tau);
    for (R& x : out.c) x *= R(k.delta);
    out.tail *= R(k.delta);
    return out;
}

// Numeric spectrum of the linearization restricted to the degree <= kmax
// invariant subspace spanned by {f_* z^j}; matrix eigensolve in critical.cpp.
std::vector<double> numeric_linearization_spectrum(const FixedPoint& fp, const EvolutionParams& p,
                                                   int kmax);

// ---------------------------------------------------------------------------
// Corridor searches
// ---------------------------------------------------------------------------

enum class Verdict { Sub, Super, Undecided };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Sub: return "sub";
        case Verdict::Super: return "super";
        case Verdict::Undecided: return "undecided";
    }
    return "?";
}

struct TraceEntry {
    double beta = 0;
    Verdict verdict = Verdict::Undecided;
    int exit_step = -1;
};

struct CriticalResult {
    double beta_star = 0;
    double tau_star = 0;
    double zeta_star = 1;
    double bracket_lo = 0;  // largest beta classified sub
    double bracket_hi = 0;  // smallest beta classified super
    double zeta_minus = 1;
    bool oracle_path = false;  // exponential seed, closed-form threshold
    ClassConstants constants;
    std::vector<TraceEntry> trace;
};

struct CriticalSearchOptions {
    double beta_tol = 1e-10;
    double zeta_tol_log = 1e-21;    // bisection tolerance on log zeta
    int corridor_n = 40;            // corridor horizon for the zeta search
    int horizon_cap = 4096;         // classification orbit cap
    double extended_switch = 1e-8;  // bracket width that triggers extended precision
    bool with_zeta = true;
};

double find_zeta_star(const LaguerreFactored& seed, double beta, const EvolutionParams& p,
                      const CriticalSearchOptions& opt = {});

CriticalResult find_beta_star(const LaguerreFactored& seed, const EvolutionParams& p,
                              const CriticalSearchOptions& opt = {});

// Critical profile f_*(t, z) of the limit theorem, closed form; requires the
// configured coupling to be critical (tau = tau_*).
inline double critical_profile(const EvolutionParams& p, double t, double z) {
    p.validate("critical.profile");
    double tau = p.tau();
    if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "critical.profile", "needs tau > 0");
    double d = static_cast<double>(p.delta);
    double a = 1.0 - 1.0 / p.delta_pow_lambda();  // 1 - delta^{-lambda}
    double den = 1.0 - t * a;
    if (!(den > 0.0)) fail(ErrorCode::InvalidArgument, "critical.profile", "t (1 - d^-l) must be < 1");
    double pre = std::pow(d, -d * p.theta * p.lambda / (d - 1.0));
    return pre * std::pow(den, -p.theta) * std::exp(a / (tau * den) * z);
}

}  // namespace lagrg
