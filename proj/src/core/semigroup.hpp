#pragma once

#include <cmath>
#include <functional>

#include "core/errors.hpp"
#include "core/quadrature.hpp"
#include "core/series.hpp"

namespace lagrg {

// (theta + zD) D f: coefficient k of the output is (k+1)(theta+k) c_{k+1}.
template <class R>
Series<R> delta_theta(const Series<R>& f, const R& theta) {
    if (theta < R(0)) fail(ErrorCode::InvalidArgument, "semigroup.delta_theta", "theta must be >= 0");
    Series<R> out(f.K);
    for (int k = 0; k < f.K; ++k) out.c[k] = R(k + 1) * (theta + R(k)) * f.c[k + 1];
    out.tail = f.tail * R(f.K + 1) * (theta + R(f.K));
    return out;
}

// exp(t Delta_theta) on coefficients. The operator is strictly degree-lowering,
// so each output coefficient is the finite sum
//   out_k = sum_{j=0}^{K-k} t^j/j! [prod_{i=1}^{j} (k+i)(theta+k+i-1)] c_{k+j},
// summed in increasing j with Kahan compensation. At theta = 0 the k = 0 sum
// collapses to c_0, which reproduces the value-preservation identity.
//
// The truncated sum only represents exp(t Delta_theta) when the full-series
// terms decay before degree K; persistent term growth at the truncation edge
// means t lies outside the domain bound and raises DivergentSum.
template <class R>
Series<R> heat_apply(const Series<R>& f, const R& theta, const R& t) {
    using std::abs;
    using std::pow;
    if (theta < R(0)) fail(ErrorCode::InvalidArgument, "semigroup.heat_apply", "theta must be >= 0");
    if (t < R(0)) fail(ErrorCode::InvalidArgument, "semigroup.heat_apply", "t must be >= 0");
    const int K = f.K;
    Series<R> out(K);
    if (t == R(0)) {
        out = f;
        return out;
    }
    R coeff_scale(0);
    for (const R& x : f.c) {
        R a = abs(x);
        if (a > coeff_scale) coeff_scale = a;
    }
    R max_edge(0);
    for (int k = 0; k <= K; ++k) {
        R sum(0), comp(0);
        R w(1);
        R prev_abs(0), last_abs(0);
        int grow_run = 0;
        const int jmax = K - k;
        for (int j = 0; j <= jmax; ++j) {
            if (j > 0) w = w * t * R(k + j) * (theta + R(k + j - 1)) / R(j);
            R term = w * f.c[k + j];
            R y = term - comp;  // Kahan
            R snew = sum + y;
            comp = (snew - sum) - y;
            sum = snew;
            R a = abs(term);
            if (a > R(0)) {
                if (prev_abs > R(0) && a >= prev_abs * R(0.99))
                    ++grow_run;
                else
                    grow_run = 0;
                prev_abs = a;
            }
            if (j == jmax) last_abs = a;
        }
        out.c[k] = sum;
        if (k == 0) {
            // Ratio test on the full-depth row: for admissible t the terms of
            // the value-at-zero sum decay geometrically before j runs out;
            // sustained near-unit ratios mean the untruncated sum diverges.
            R floor = abs(sum);
            if (coeff_scale > floor) floor = coeff_scale;
            if (jmax >= 12 && grow_run >= 6 && last_abs > R(1e-9) * floor)
                fail(ErrorCode::DivergentSum, "semigroup.heat_apply",
                     "value-at-zero sum fails the ratio test; t outside the domain bound");
        }
        if (last_abs > max_edge) max_edge = last_abs;
    }
    // crude dropped-mass bookkeeping: edge terms plus amplified input tail
    R amp = t < R(1) ? pow(R(1) - t, -theta) : pow(R(10), theta);
    out.tail = f.tail * amp + max_edge;
    check_finite(out, "semigroup.heat_apply");
    return out;
}

// w_theta(z) = sum_k z^k / (k! Gamma(theta + k)), summed until the absolute
// tail is below tol.
inline double w_theta(double z, double theta, double tol) {
    if (!(theta > 0.0)) fail(ErrorCode::InvalidArgument, "semigroup.w_theta", "theta must be > 0");
    double term = 1.0 / std::tgamma(theta);
    double sum = term;
    for (int k = 1; k < 4000; ++k) {
        term *= z / (k * (theta + k - 1.0));
        sum += term;
        double r = std::abs(z) / ((k + 1) * (theta + k));
        if (r < 0.5 && std::abs(term) * r / (1.0 - r) < tol) break;
    }
    return sum;
}

// Integral form e^{-z/t} int_0^inf s^{theta-1} w_theta(z s / t) e^{-s} g(t s) ds,
// by generalized Gauss-Laguerre with weight s^{theta-1} e^{-s}. Nodes double
// from 32 to 256 until two successive rules agree.
inline double heat_apply_integral(const std::function<double(double)>& g, double theta, double t,
                                  double z, double tol = 1e-10) {
    if (!(theta > 0.0))
        fail(ErrorCode::InvalidArgument, "semigroup.heat_apply_integral", "theta must be > 0");
    if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "semigroup.heat_apply_integral", "t must be > 0");
    double pre = std::exp(-z / t);
    double prev = 0.0;
    bool have_prev = false;
    for (int n = 32; n <= 256; n *= 2) {
        const QuadRule& q = gauss_laguerre(n, theta - 1.0);
        double acc = 0.0;
        for (size_t i = 0; i < q.x.size(); ++i) {
            double s = q.x[i];
            acc += q.w[i] * w_theta(z * s / t, theta, tol * 1e-3) * g(t * s);
        }
        double val = pre * acc;
        if (have_prev && std::abs(val - prev) <= tol * std::max(1.0, std::abs(val))) return val;
        prev = val;
        have_prev = true;
    }
    fail(ErrorCode::QuadratureNonconvergent, "semigroup.heat_apply_integral",
         "node doubling did not converge to requested tolerance");
}

// exp(u Delta_theta)[e^{vz} h(z)] = e^{vz/(1-uv)} h_u(z) with
// h_u = (1-uv)^{-theta} [exp(u(1-uv) Delta_theta) h](z / (1-uv)^2).
template <class R>
struct ShiftResult {
    R rate;          // v / (1 - uv)
    Series<R> h_u;   // transformed cofactor
};

template <class R>
ShiftResult<R> shift_identity(const Series<R>& h, const R& v, const R& u, const R& theta) {
    using std::pow;
    R s = R(1) - u * v;
    if (!(s > R(0)))
        fail(ErrorCode::SingularTime, "semigroup.shift_identity", "uv >= 1: exponential family blow-up");
    Series<R> heated = heat_apply(h, theta, u * s);
    Series<R> hu = scale_argument(heated, R(1) / (s * s));
    R factor = pow(s, -theta);
    for (R& x : hu.c) x *= factor;
    hu.tail *= factor;
    return {v / s, hu};
}

}  // namespace lagrg
