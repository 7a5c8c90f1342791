#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "core/errors.hpp"
#include "core/series.hpp"

namespace lagrg {

// Factored form C z^m e^{alpha z} prod_j (1 + gamma_j z) of a Laguerre-class
// entire function; the infinite product is stored as a finite list.
struct LaguerreFactored {
    double C = 1.0;
    int m = 0;
    double alpha = 0.0;
    std::vector<double> gammas;  // nonincreasing, all >= 0

    void validate(const char* where) const {
        if (!(C > 0.0)) fail(ErrorCode::InvalidArgument, where, "C must be positive");
        if (m < 0) fail(ErrorCode::InvalidArgument, where, "m must be nonnegative");
        if (alpha < 0.0) fail(ErrorCode::InvalidArgument, where, "alpha must be nonnegative");
        for (size_t j = 0; j < gammas.size(); ++j) {
            if (gammas[j] < 0.0) fail(ErrorCode::InvalidArgument, where, "gammas must be nonnegative");
            if (j > 0 && gammas[j] > gammas[j - 1])
                fail(ErrorCode::InvalidArgument, where, "gammas must be nonincreasing");
        }
    }
};

// m_k = sum_j gamma_j^k, exact over the stored list.
inline std::vector<double> moments(const LaguerreFactored& g, int kmax) {
    if (kmax < 1) fail(ErrorCode::InvalidArgument, "laguerre.moments", "kmax must be >= 1");
    std::vector<double> m(static_cast<size_t>(kmax), 0.0);
    for (double gamma : g.gammas) {
        double p = 1.0;
        for (int k = 0; k < kmax; ++k) {
            p *= gamma;
            m[static_cast<size_t>(k)] += p;
        }
    }
    return m;
}

struct CouplingInterval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();  // +inf when alpha == 0
};

// Admissible couplings [0, (delta^lambda - 1)/alpha]; all of [0, inf) for alpha = 0.
inline CouplingInterval coupling_interval(const LaguerreFactored& g, int delta, double lambda) {
    if (delta < 2) fail(ErrorCode::InvalidArgument, "laguerre.coupling_interval", "delta must be >= 2");
    if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "laguerre.coupling_interval", "lambda must be positive");
    CouplingInterval I;
    if (g.alpha > 0.0) I.hi = (std::pow(static_cast<double>(delta), lambda) - 1.0) / g.alpha;
    return I;
}

struct ClassConstants {
    double epsilon = 0.0;       // (1 - 2 lambda)/4
    double theta_lambda = 0.0;  // (1 - delta^{-eps}) / (delta^lambda - delta^{-eps})
    double sigma = 0.0;         // solves m2/(alpha+m1)^2 = (sqrt(delta)/(theta+1)) (1-sigma)/(delta^lambda-sigma)
    double Phi1 = 0.0;          // (1 - sigma delta^{-lambda}) / (1 - delta^{-lambda})
    double Phi2 = 0.0;          // -Phi1 delta^{1-lambda}/(theta+1) sigma^2 (1-sigma)/(delta^lambda-1)
};

struct ClassCheck {
    bool member = false;
    ClassConstants k;
    double ratio1 = 0.0;  // m2/(alpha+m1)^2
    double ratio2 = 0.0;  // m2/m1^2
    double bound1 = 0.0;  // sqrt(delta)/(theta+1) * theta_lambda
    double bound2 = 0.0;  // sqrt(delta)/(theta+1)
};

// Membership in the class the threshold theory needs: g normalized, not
// constant, with both second-moment ratios small enough. Pure exponentials
// (empty product) are rejected; they are handled by the closed-form orbit.
inline ClassCheck in_class_lambda(const LaguerreFactored& g, double theta, int delta, double lambda) {
    g.validate("laguerre.in_class_lambda");
    if (!(lambda > 0.0 && lambda < 0.5))
        fail(ErrorCode::InvalidArgument, "laguerre.in_class_lambda", "lambda must be in (0, 1/2)");
    if (theta < 0.0) fail(ErrorCode::InvalidArgument, "laguerre.in_class_lambda", "theta must be >= 0");
    if (g.C != 1.0 || g.m != 0)
        fail(ErrorCode::NotNormalized, "laguerre.in_class_lambda", "needs g(0) = 1 (C = 1, m = 0)");
    std::vector<double> mk = moments(g, 2);
    double m1 = mk[0], m2 = mk[1];
    if (m1 <= 0.0)
        fail(ErrorCode::DegenerateInput, "laguerre.in_class_lambda",
             "empty product: exponential family, not in L(lambda)");

    double d = static_cast<double>(delta);
    double dl = std::pow(d, lambda);
    ClassCheck out;
    out.k.epsilon = (1.0 - 2.0 * lambda) / 4.0;
    double de = std::pow(d, -out.k.epsilon);
    out.k.theta_lambda = (1.0 - de) / (dl - de);
    out.ratio1 = m2 / ((g.alpha + m1) * (g.alpha + m1));
    out.ratio2 = m2 / (m1 * m1);
    double root = std::sqrt(d) / (theta + 1.0);
    out.bound1 = root * out.k.theta_lambda;
    out.bound2 = root;
    out.member = out.ratio1 <= out.bound1 && out.ratio2 <= out.bound2;
    if (out.member) {
        // (1-sigma)/(delta^lambda-sigma) = q is linear in sigma.
        double q = out.ratio1 / root;
        out.k.sigma = (1.0 - q * dl) / (1.0 - q);
        double idl = 1.0 / dl;
        out.k.Phi1 = (1.0 - out.k.sigma * idl) / (1.0 - idl);
        out.k.Phi2 = -out.k.Phi1 * (d / dl / (theta + 1.0)) * out.k.sigma * out.k.sigma *
                     (1.0 - out.k.sigma) / (dl - 1.0);
    }
    return out;
}

// Truncated series of C z^m e^{alpha z} prod (1 + gamma_j z).
template <class R>
Series<R> to_series(const LaguerreFactored& g, int K) {
    using std::abs;
    using std::exp;
    if (K < 1) fail(ErrorCode::InvalidArgument, "laguerre.to_series", "K must be >= 1");
    g.validate("laguerre.to_series");
    if (g.m > K) fail(ErrorCode::InvalidArgument, "laguerre.to_series", "zero order exceeds K");
    int deg = K - g.m;
    Series<R> s = exponential_series(R(g.alpha), deg);
    for (double gamma : g.gammas) {
        // multiply by (1 + gamma z) in place
        R gr(gamma);
        R dropped = abs(s.c[deg] * gr);
        for (int k = deg; k >= 1; --k) s.c[k] += gr * s.c[k - 1];
        s.tail = s.tail * (R(1) + gr) + dropped;
    }
    Series<R> out(K);
    R Cr(g.C);
    for (int k = 0; k <= deg; ++k) out.c[k + g.m] = Cr * s.c[k];
    out.tail = abs(Cr) * s.tail;
    return out;
}

// Scale the argument of the factored form: g(beta z) has alpha, gammas scaled.
inline LaguerreFactored scale_seed(const LaguerreFactored& g, double beta) {
    LaguerreFactored out = g;
    out.alpha *= beta;
    for (double& gamma : out.gammas) gamma *= beta;
    if (out.m != 0) out.C *= std::pow(beta, out.m);
    return out;
}

}  // namespace lagrg
