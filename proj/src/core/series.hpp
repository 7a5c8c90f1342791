#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/real.hpp"

namespace lagrg {

// Truncated Taylor series at the origin: c[k] is the coefficient of z^k,
// k = 0..K. tail is a crude magnitude bound on everything an operation has
// dropped past degree K (sum of absolute dropped contributions).
template <class R>
struct Series {
    int K = 0;
    std::vector<R> c;
    R tail{0};

    Series() = default;
    explicit Series(int degree) : K(degree), c(static_cast<size_t>(degree) + 1, R(0)) {}

    const R& operator[](int k) const { return c[static_cast<size_t>(k)]; }
    R& operator[](int k) { return c[static_cast<size_t>(k)]; }
};

template <class R>
Series<R> constant_series(int K, const R& value) {
    Series<R> s(K);
    s.c[0] = value;
    return s;
}

// e^{vz} truncated at degree K; the dropped tail is bounded through e^{|v|}.
template <class R>
Series<R> exponential_series(const R& v, int K) {
    using std::abs;
    using std::exp;
    Series<R> s(K);
    R term(1);
    s.c[0] = term;
    R absterm(1);
    for (int k = 1; k <= K; ++k) {
        term = term * v / R(k);
        s.c[k] = term;
        absterm = absterm * abs(v) / R(k);
    }
    s.tail = absterm * abs(v) / R(K + 1) * exp(abs(v));
    return s;
}

template <class R>
void check_finite(const Series<R>& f, const char* where) {
    for (const R& x : f.c)
        if (!finite(x)) fail(ErrorCode::TruncationFailure, where, "non-finite coefficient");
}

template <class R>
R eval(const Series<R>& f, const R& z) {
    R acc(0);
    for (int k = f.K; k >= 0; --k) acc = acc * z + f.c[k];
    return acc;
}

template <class R>
R abs_coeff_sum(const Series<R>& f) {
    using std::abs;
    R s(0);
    for (const R& x : f.c) s += abs(x);
    return s;
}

// z |-> s z. For |s| <= 1 the dropped mass shrinks by at least |s|^K; for
// |s| > 1 dropped degree-j terms grow like |s|^j, which we cap at the 2K
// degrees multiplication can ever produce.
template <class R>
Series<R> scale_argument(const Series<R>& f, const R& s) {
    using std::abs;
    using std::pow;
    Series<R> out(f.K);
    R p(1);
    for (int k = 0; k <= f.K; ++k) {
        out.c[k] = f.c[k] * p;
        p *= s;
    }
    R a = abs(s);
    out.tail = f.tail * (a <= R(1) ? pow(a, f.K) : pow(a, 2 * f.K));
    return out;
}

// Truncated product; everything of degree > K goes into tail.
template <class R>
Series<R> mul(const Series<R>& f, const Series<R>& g) {
    using std::abs;
    if (f.K != g.K) fail(ErrorCode::InvalidArgument, "series.mul", "degree mismatch");
    const int K = f.K;
    Series<R> out(K);
    R dropped(0);
    for (int i = 0; i <= K; ++i) {
        if (f.c[i] == R(0)) continue;
        for (int j = 0; j <= K; ++j) {
            R t = f.c[i] * g.c[j];
            if (i + j <= K)
                out.c[i + j] += t;
            else
                dropped += abs(t);
        }
    }
    out.tail = dropped + f.tail * abs_coeff_sum(g) + g.tail * abs_coeff_sum(f) + f.tail * g.tail;
    return out;
}

// log f, requires f(0) > 0. Coefficient recurrence from f (log f)' = f'.
template <class R>
Series<R> log_series(const Series<R>& f) {
    using std::abs;
    using std::log;
    if (!(f.c[0] > R(0)))
        fail(ErrorCode::ZeroConstantTerm, "series.log", "constant term must be positive");
    const int K = f.K;
    Series<R> l(K);
    l.c[0] = log(f.c[0]);
    for (int n = 1; n <= K; ++n) {
        R s = R(n) * f.c[n];
        for (int k = 1; k < n; ++k) s -= R(k) * l.c[k] * f.c[n - k];
        l.c[n] = s / (R(n) * f.c[0]);
    }
    l.tail = f.tail / abs(f.c[0]);
    return l;
}

// exp u via coefficient recurrence from (exp u)' = u' exp u.
template <class R>
Series<R> exp_series(const Series<R>& u) {
    using std::exp;
    const int K = u.K;
    Series<R> e(K);
    e.c[0] = exp(u.c[0]);
    for (int n = 1; n <= K; ++n) {
        R s(0);
        for (int k = 1; k <= n; ++k) s += R(k) * u.c[k] * e.c[n - k];
        e.c[n] = s / R(n);
    }
    e.tail = u.tail * abs_coeff_sum(e);
    return e;
}

enum class PowRoute { Auto, LogExp, Convolution };

// f^p for integer p >= 1. The log/exp route is stable for the large
// delta-powers of near-exponential series the dynamics produces; the
// convolution route exists for c_0 <= 0 inputs.
template <class R>
Series<R> pow_integer(const Series<R>& f, long p, PowRoute route = PowRoute::Auto) {
    if (p < 1) fail(ErrorCode::InvalidArgument, "series.pow", "exponent must be >= 1");
    if (p == 1) return f;
    bool log_ok = f.c[0] > R(0);
    if (route == PowRoute::LogExp && !log_ok)
        fail(ErrorCode::ZeroConstantTerm, "series.pow", "log route needs positive constant term");
    if (route == PowRoute::Auto) route = log_ok ? PowRoute::LogExp : PowRoute::Convolution;
    if (route == PowRoute::LogExp) {
        Series<R> l = log_series(f);
        for (R& x : l.c) x *= R(p);
        l.tail *= R(p);
        return exp_series(l);
    }
    Series<R> acc = constant_series(f.K, R(1));
    Series<R> base = f;
    long e = p;
    while (e > 0) {  // binary powering on truncated products
        if (e & 1) acc = mul(acc, base);
        e >>= 1;
        if (e > 0) base = mul(base, base);
    }
    return acc;
}

// Derivatives of log f at 0: phi[k-1] = (D^k log f)(0) = k! * (log f)_k.
template <class R>
struct LogDerivs {
    std::vector<R> phi;  // phi[k-1] holds phi^(k), k = 1..upto
    R operator()(int k) const { return phi[static_cast<size_t>(k) - 1]; }
    int upto() const { return static_cast<int>(phi.size()); }
};

template <class R>
LogDerivs<R> log_derivatives(const Series<R>& f, int upto) {
    if (upto < 1 || upto > f.K)
        fail(ErrorCode::InvalidArgument, "series.log_derivatives", "upto out of range");
    Series<R> l = log_series(f);
    LogDerivs<R> d;
    d.phi.resize(static_cast<size_t>(upto));
    R fact(1);
    for (int k = 1; k <= upto; ++k) {
        fact *= R(k);
        d.phi[static_cast<size_t>(k) - 1] = fact * l.c[k];
    }
    return d;
}

// Graded norm sup_k b^{-k} |f^(k)(0)| over the stored degrees, with the
// attaining index. argmax == K signals truncation-dominated growth.
template <class R>
struct NormResult {
    R value;
    int argmax;
};

template <class R>
NormResult<R> norm_b(const Series<R>& f, const R& b) {
    using std::abs;
    if (!(b > R(0))) fail(ErrorCode::InvalidArgument, "series.norm_b", "b must be positive");
    R best = abs(f.c[0]);
    int arg = 0;
    R w(1);  // k! / b^k
    for (int k = 1; k <= f.K; ++k) {
        w *= R(k) / b;
        R v = w * abs(f.c[k]);
        if (v > best) {
            best = v;
            arg = k;
        }
    }
    return {best, arg};
}

// 1/f for f(0) != 0.
template <class R>
Series<R> reciprocal(const Series<R>& f) {
    using std::abs;
    if (f.c[0] == R(0))
        fail(ErrorCode::ZeroConstantTerm, "series.reciprocal", "constant term is zero");
    const int K = f.K;
    Series<R> r(K);
    r.c[0] = R(1) / f.c[0];
    for (int n = 1; n <= K; ++n) {
        R s(0);
        for (int k = 1; k <= n; ++k) s += f.c[k] * r.c[n - k];
        r.c[n] = -s / f.c[0];
    }
    r.tail = f.tail * abs(r.c[0]) * abs_coeff_sum(r);
    return r;
}

// Divide out the value at 0, returning it. The normalized series has c_0 = 1.
template <class R>
R normalize_at_zero(Series<R>& f) {
    using std::abs;
    R v = f.c[0];
    if (!(v > R(0)))
        fail(ErrorCode::ZeroConstantTerm, "series.normalize", "value at 0 not positive");
    for (R& x : f.c) x /= v;
    f.tail /= abs(v);
    return v;
}

// Largest violation of the Laguerre sign rule (-1)^(k-1) phi^(k) >= 0,
// measured on the log-series coefficients relative to max(1, |l_k|).
template <class R>
R sign_rule_violation(const Series<R>& f, int kmax) {
    using std::abs;
    using std::max;
    Series<R> l = log_series(f);
    R worst(0);
    for (int k = 1; k <= std::min(kmax, f.K); ++k) {
        R signed_val = (k % 2 == 1) ? l.c[k] : -l.c[k];
        if (signed_val < R(0)) worst = max(worst, -signed_val / max(R(1), abs(l.c[k])));
    }
    return worst;
}

}  // namespace lagrg
