#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "core/errors.hpp"
#include "core/laguerre.hpp"
#include "core/semigroup.hpp"
#include "core/series.hpp"

namespace lagrg {

struct EvolutionParams {
    double theta = 0.0;
    double lambda = 0.25;
    int delta = 2;
    double beta = 1.0;  // coupling; tau = beta (delta^lambda - 1)
    int K = 64;
    int n_max = 60;
    double tol = 1e-9;
    double quad_tol = 1e-10;
    Precision precision = Precision::Double;

    double delta_pow_lambda() const { return std::pow(static_cast<double>(delta), lambda); }
    double tau() const { return beta * (delta_pow_lambda() - 1.0); }

    void validate(const char* where) const {
        if (theta < 0.0) fail(ErrorCode::InvalidArgument, where, "theta must be >= 0");
        if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, where, "lambda must be positive");
        if (delta < 2) fail(ErrorCode::InvalidArgument, where, "delta must be an integer >= 2");
        if (beta < 0.0) fail(ErrorCode::InvalidArgument, where, "beta must be >= 0");
        if (K < 4) fail(ErrorCode::InvalidArgument, where, "K must be >= 4");
        if (n_max < 1) fail(ErrorCode::InvalidArgument, where, "n_max must be >= 1");
        if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, where, "tol must be positive");
    }
};

// Parameter-derived constants evaluated in the working precision, so that
// extended orbits are not polluted by double-rounded powers.
template <class R>
struct StepConstants {
    R theta, lambda, tau, beta;
    R dl;         // delta^lambda
    R inv_dl;     // delta^{-lambda}
    R rescale;    // delta^{-1-lambda}
    int delta;

    static StepConstants make(const EvolutionParams& p) {
        using std::pow;
        StepConstants k;
        k.theta = R(p.theta);
        k.lambda = R(p.lambda);
        k.beta = R(p.beta);
        k.delta = p.delta;
        k.dl = pow(R(p.delta), R(p.lambda));
        k.inv_dl = R(1) / k.dl;
        k.rescale = k.inv_dl / R(p.delta);
        k.tau = k.beta * (k.dl - R(1));
        return k;
    }
};

// One interval of the modified Cauchy problem: rescale-power, then diffuse
// for time t*tau.
template <class R>
Series<R> step_T(const Series<R>& f, const StepConstants<R>& k, const R& t) {
    if (!(f.c[0] > R(0))) fail(ErrorCode::InvalidArgument, "dynamics.step_T", "f(0) must be positive");
    Series<R> s = scale_argument(f, k.rescale);
    Series<R> p = pow_integer(s, k.delta);
    return heat_apply(p, k.theta, t * k.tau);
}

template <class R>
Series<R> step_T(const Series<R>& f, const EvolutionParams& p, const R& t) {
    return step_T(f, StepConstants<R>::make(p), t);
}

// The beta-free map: time delta^lambda - 1, coupling absorbed into the seed.
template <class R>
Series<R> step_Q(const Series<R>& g, const StepConstants<R>& k) {
    Series<R> s = scale_argument(g, k.rescale);
    Series<R> p = pow_integer(s, k.delta);
    return heat_apply(p, k.theta, k.dl - R(1));
}

template <class R>
Series<R> step_Q(const Series<R>& g, const EvolutionParams& p) {
    return step_Q(g, StepConstants<R>::make(p));
}

// Classically normalized map: rescale by delta^{-1}, diffuse for the decaying
// time delta^{-n lambda}(delta^lambda - 1), divide out the value at 0.
template <class R>
Series<R> step_Q_tilde(const Series<R>& g, int n, const StepConstants<R>& k) {
    using std::pow;
    if (!(g.c[0] > R(0)))
        fail(ErrorCode::InvalidArgument, "dynamics.step_Q_tilde", "g(0) must be positive");
    Series<R> s = scale_argument(g, R(1) / R(k.delta));
    Series<R> p = pow_integer(s, k.delta);
    R t = pow(k.inv_dl, n) * (k.dl - R(1));
    Series<R> out = heat_apply(p, k.theta, t);
    normalize_at_zero(out);
    return out;
}

template <class R>
Series<R> step_Q_tilde(const Series<R>& g, int n, const EvolutionParams& p) {
    return step_Q_tilde(g, n, StepConstants<R>::make(p));
}

enum class OrbitVariant { T, Q, QTilde };

// Per-step state of an orbit. The stored series is normalized to value 1 at
// the origin; the normalization constant lives in log_C (log C_n accumulates
// as delta * log C_{n-1} + log of the step's value at 0).
template <class R>
struct OrbitRecord {
    int n = 0;
    R log_C{0};
    R phi1{0};
    R phi2{0};
    R nu{0};
    R kappa{0};
    bool nu_valid = false;
    unsigned flags = 0;  // bits 0..5: (ce1),(ce2),(ce3),(e4),(e5),(e6); bit 6: evaluated
    R tail{0};
    Series<R> series;
};

constexpr unsigned kFlagCe1 = 1u << 0;
constexpr unsigned kFlagCe2 = 1u << 1;
constexpr unsigned kFlagCe3 = 1u << 2;
constexpr unsigned kFlagE4 = 1u << 3;
constexpr unsigned kFlagE5 = 1u << 4;
constexpr unsigned kFlagE6 = 1u << 5;
constexpr unsigned kFlagChecked = 1u << 6;
constexpr unsigned kAllEstimates = kFlagCe1 | kFlagCe2 | kFlagCe3 | kFlagE4 | kFlagE5 | kFlagE6;

struct OrbitOptions {
    int n_steps = -1;             // -1: run to n_max with fixed-point early stop
    bool keep_series = true;
    bool check_truncation = true;
    double truncation_threshold = 1e-6;
};

namespace detail {

// inequality check with relative slack 1e-9 * max(1, |lhs|, |rhs|)
template <class R>
bool geq(const R& lhs, const R& rhs) {
    using std::abs;
    R slack = R(1);
    if (abs(lhs) > slack) slack = abs(lhs);
    if (abs(rhs) > slack) slack = abs(rhs);
    return lhs >= rhs - R(1e-9) * slack;
}

template <class R>
bool leq(const R& lhs, const R& rhs) {
    return geq(rhs, lhs);
}

}  // namespace detail

// Iterate one of the maps from a factored seed, tracking normalization,
// log-derivatives, nu/kappa and the main-estimate flags. Estimates are only
// evaluated at steps where the previous phi1 satisfies the domain inequality
// phi1 < (1 - delta^{-lambda})^{-1}; a nonpositive nu denominator is recorded
// (nu_valid = false), not fatal.
template <class R>
std::vector<OrbitRecord<R>> run_orbit(const LaguerreFactored& seed, const EvolutionParams& p,
                                      OrbitVariant variant, const OrbitOptions& opt = {}) {
    using std::abs;
    using std::exp;
    using std::log;
    using std::pow;
    p.validate("dynamics.run_orbit");
    seed.validate("dynamics.run_orbit");
    if (seed.m != 0)
        fail(ErrorCode::InvalidArgument, "dynamics.run_orbit", "dynamics seeds require m = 0");

    // tau must lie in the admissible interval of the seed
    CouplingInterval I = coupling_interval(seed, p.delta, p.lambda);
    if (p.tau() > I.hi * (1.0 + 1e-12))
        fail(ErrorCode::SingularOrbit, "dynamics.run_orbit", "tau outside I(seed)");

    const StepConstants<R> k = StepConstants<R>::make(p);
    const bool scaled_seed = variant != OrbitVariant::T;  // Q and Q~ run on g(beta z)
    LaguerreFactored s0 = scaled_seed ? scale_seed(seed, p.beta) : seed;

    Series<R> cur = to_series<R>(s0, p.K);
    R log_C = log(cur.c[0]);
    normalize_at_zero(cur);

    const int total = opt.n_steps >= 0 ? opt.n_steps : p.n_max;
    const bool early_stop = opt.n_steps < 0;
    const int derivs_upto = std::min(8, p.K);

    std::vector<OrbitRecord<R>> records;
    records.reserve(static_cast<size_t>(total) + 1);

    auto make_record = [&](int n, const Series<R>& ser, const R& logC, const R& prev_phi1,
                           bool have_prev, const R& prev_phi2, const R& prev_logC) {
        OrbitRecord<R> rec;
        rec.n = n;
        rec.log_C = logC;
        rec.tail = ser.tail;
        LogDerivs<R> d = log_derivatives(ser, derivs_upto);
        rec.phi1 = d(1);
        rec.phi2 = derivs_upto >= 2 ? d(2) : R(0);
        if (have_prev) {
            R den = R(1) - (R(1) - k.inv_dl) * prev_phi1;
            if (den > R(0)) {
                rec.nu = R(1) / den;
                rec.kappa = k.inv_dl * rec.nu;
                rec.nu_valid = true;
                rec.flags = kFlagChecked;
                R theta = k.theta;
                R dl2m1 = pow(k.dl, 2) / R(k.delta);  // delta^{2 lambda - 1}
                R lnu = theta * log(rec.nu);
                // ce1..ce3 compared in log scale
                bool ce1 = detail::geq(rec.log_C, R(k.delta) * prev_logC);
                bool ce2 = detail::leq(rec.log_C, R(k.delta) * prev_logC + lnu);
                R ce3_rhs = R(k.delta) * prev_logC + lnu +
                            R(0.5) * theta * (theta + R(1)) * rec.kappa * rec.kappa *
                                (R(1) - k.inv_dl) * (R(1) - k.inv_dl) * dl2m1 * prev_phi2;
                bool ce3 = detail::geq(rec.log_C, ce3_rhs);
                bool e4 = detail::geq(rec.phi2, dl2m1 * pow(rec.kappa, 4) * prev_phi2);
                bool e5 = detail::leq(rec.phi1, rec.kappa * prev_phi1);
                R e6_rhs = rec.kappa * prev_phi1 + (theta + R(1)) * (R(1) - k.inv_dl) * dl2m1 *
                                                       pow(rec.kappa, 3) * prev_phi2;
                bool e6 = detail::geq(rec.phi1, e6_rhs);
                rec.flags |= (ce1 ? kFlagCe1 : 0u) | (ce2 ? kFlagCe2 : 0u) | (ce3 ? kFlagCe3 : 0u) |
                             (e4 ? kFlagE4 : 0u) | (e5 ? kFlagE5 : 0u) | (e6 ? kFlagE6 : 0u);
            }
        }
        if (opt.keep_series) rec.series = ser;
        return rec;
    };

    records.push_back(make_record(0, cur, log_C, R(0), false, R(0), R(0)));

    int near_fp = 0;
    for (int n = 1; n <= total; ++n) {
        R prev_phi1 = records.back().phi1;
        R prev_phi2 = records.back().phi2;
        R prev_logC = log_C;

        Series<R> next;
        switch (variant) {
            case OrbitVariant::T: next = step_T(cur, k, R(1)); break;
            case OrbitVariant::Q: next = step_Q(cur, k); break;
            case OrbitVariant::QTilde: {
                Series<R> s = scale_argument(cur, R(1) / R(k.delta));
                Series<R> pw = pow_integer(s, k.delta);
                next = heat_apply(pw, k.theta, pow(k.inv_dl, n) * (k.dl - R(1)));
                break;
            }
        }
        R value0 = next.c[0];
        if (!(value0 > R(0)))
            fail(ErrorCode::SingularOrbit, "dynamics.run_orbit", "step value at 0 not positive");
        log_C = R(k.delta) * log_C + log(value0);
        normalize_at_zero(next);
        if (opt.check_truncation && next.tail > R(opt.truncation_threshold))
            fail(ErrorCode::TruncationFailure, "dynamics.run_orbit",
                 "tail estimate exceeds threshold at step " + std::to_string(n));
        cur = next;
        records.push_back(make_record(n, cur, log_C, prev_phi1, true, prev_phi2, prev_logC));

        if (early_stop) {
            const OrbitRecord<R>& r = records.back();
            R tol = R(p.tol);
            // trivial fixed point: (phi1, phi2, C) -> (0, 0, 1); critical:
            // phi1 -> u* in the variant's coordinates with C -> C_{2,*}
            bool trivial = abs(r.phi1) < tol && abs(r.phi2) < tol && abs(r.log_C) < tol;
            bool critical = false;
            if (k.tau > R(0)) {
                R u_star = variant == OrbitVariant::T ? (k.dl - R(1)) / k.tau : R(1);
                R logC2 = -k.lambda * k.theta * log(R(k.delta)) / R(k.delta - 1);
                critical = abs(r.phi1 - u_star) < tol && abs(r.phi2) < tol &&
                           abs(r.log_C - logC2) < tol;
            }
            bool tilde_cauchy = variant == OrbitVariant::QTilde &&
                                abs(r.phi1 - prev_phi1) < tol && abs(r.phi2) < tol;
            if (trivial || critical || tilde_cauchy)
                ++near_fp;
            else
                near_fp = 0;
            if (near_fp >= 3) break;
        }
    }
    return records;
}

// run_orbit with the precision picked at runtime, records reduced to double.
struct OrbitRecordD {
    int n = 0;
    double log_C = 0, phi1 = 0, phi2 = 0, nu = 0, kappa = 0;
    bool nu_valid = false;
    unsigned flags = 0;
    double tail = 0;
    Series<double> series;
};

template <class R>
OrbitRecordD reduce_record(const OrbitRecord<R>& r) {
    OrbitRecordD d;
    d.n = r.n;
    d.log_C = to_double(r.log_C);
    d.phi1 = to_double(r.phi1);
    d.phi2 = to_double(r.phi2);
    d.nu = to_double(r.nu);
    d.kappa = to_double(r.kappa);
    d.nu_valid = r.nu_valid;
    d.flags = r.flags;
    d.tail = to_double(r.tail);
    d.series.K = r.series.K;
    d.series.tail = to_double(r.series.tail);
    d.series.c.reserve(r.series.c.size());
    for (const R& x : r.series.c) d.series.c.push_back(to_double(x));
    return d;
}

inline std::vector<OrbitRecordD> run_orbit_dispatch(const LaguerreFactored& seed,
                                                    const EvolutionParams& p, OrbitVariant variant,
                                                    const OrbitOptions& opt = {}) {
    std::vector<OrbitRecordD> out;
    if (p.precision == Precision::ExtendedPrec) {
        for (const auto& r : run_orbit<Extended>(seed, p, variant, opt))
            out.push_back(reduce_record(r));
    } else {
        for (const auto& r : run_orbit<double>(seed, p, variant, opt))
            out.push_back(reduce_record(r));
    }
    return out;
}

}  // namespace lagrg
