#include "core/limits.hpp"

#include <cmath>

namespace lagrg {

double GridDensity::mass() const {
    double acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        double w = (i == 0 || i + 1 == p.size()) ? 0.5 : 1.0;  // trapezoid
        acc += w * p[i];
    }
    return acc * h;
}

GridDensity gaussian_grid(double sigma, double half_width, int n_points) {
    if (!(sigma > 0.0) || !(half_width > 0.0) || n_points < 16)
        fail(ErrorCode::InvalidArgument, "limits.gaussian_grid", "bad grid request");
    GridDensity g;
    g.y0 = -half_width;
    g.h = 2.0 * half_width / (n_points - 1);
    g.p.resize(static_cast<size_t>(n_points));
    double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    for (int i = 0; i < n_points; ++i) {
        double y = g.y0 + g.h * i;
        g.p[static_cast<size_t>(i)] = norm * std::exp(-0.5 * y * y / (sigma * sigma));
    }
    return g;
}

namespace {

// cubic 4-point Lagrange interpolation on a uniform grid
double interp(const std::vector<double>& v, double idx) {
    if (idx <= 0.0) return v.front();
    double last = static_cast<double>(v.size()) - 1.0;
    if (idx >= last) return v.back();
    long i = static_cast<long>(idx);
    long n = static_cast<long>(v.size());
    long i0 = i - 1;
    if (i0 < 0) i0 = 0;
    if (i0 > n - 4) i0 = n - 4;
    double t = idx - static_cast<double>(i0);
    double c0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
    double c1 = t * (t - 2) * (t - 3) / 2.0;
    double c2 = -t * (t - 1) * (t - 3) / 2.0;
    double c3 = t * (t - 1) * (t - 2) / 6.0;
    return c0 * v[static_cast<size_t>(i0)] + c1 * v[static_cast<size_t>(i0 + 1)] +
           c2 * v[static_cast<size_t>(i0 + 2)] + c3 * v[static_cast<size_t>(i0 + 3)];
}

}  // namespace

GridDensity measure_step_oracle(const GridDensity& density, const EvolutionParams& p,
                                const HierarchyParams& hp, MeasureVariant variant, int level) {
    p.validate("limits.measure_step_oracle");
    hp.validate("limits.measure_step_oracle");
    if (hp.N != 1)
        fail(ErrorCode::InvalidArgument, "limits.measure_step_oracle", "grid oracle is N = 1 only");
    const size_t n = density.p.size();
    if (n < 64 || density.h <= 0.0)
        fail(ErrorCode::InvalidArgument, "limits.measure_step_oracle", "bad grid");

    // delta-fold convolution on the extended grid (direct, grids are small)
    std::vector<double> conv = density.p;
    for (int copy = 1; copy < p.delta; ++copy) {
        std::vector<double> next(conv.size() + n - 1, 0.0);
        for (size_t i = 0; i < conv.size(); ++i) {
            if (conv[i] == 0.0) continue;
            double ci = conv[i] * density.h;
            for (size_t j = 0; j < n; ++j) next[i + j] += ci * density.p[j];
        }
        conv = std::move(next);
    }
    // conv covers [delta*y0, -delta*y0] at spacing h
    double conv_y0 = p.delta * density.y0;

    double s = variant == MeasureVariant::Abnormal
                   ? std::pow(static_cast<double>(p.delta), 0.5 * (1.0 + p.lambda))
                   : std::sqrt(static_cast<double>(p.delta));
    double w_exp = 0.25 * p.tau();
    if (variant == MeasureVariant::Classical)
        w_exp *= std::pow(static_cast<double>(p.delta), -level * p.lambda);

    // mass escaping the rescaled window [y0, -y0], i.e. |u| > s*|y0| before rescale
    double leak = 0.0, total = 0.0;
    for (size_t i = 0; i < conv.size(); ++i) {
        double u = conv_y0 + density.h * static_cast<double>(i);
        total += conv[i];
        if (std::abs(u) > s * std::abs(density.y0)) leak += conv[i];
    }
    if (total > 0.0 && leak / total > 1e-8)
        fail(ErrorCode::MassLeak, "limits.measure_step_oracle",
             "tail mass beyond the grid exceeds 1e-8 after rescaling");

    GridDensity out;
    out.y0 = density.y0;
    out.h = density.h;
    out.p.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double y = density.y(i);
        double idx = (s * y - conv_y0) / density.h;
        double val = s * interp(conv, idx);
        if (val < 0.0) val = 0.0;  // interpolation wiggle below machine-level tails
        out.p[i] = val * std::exp(w_exp * y * y);
    }
    double m = out.mass();
    if (!(m > 0.0))
        fail(ErrorCode::MassLeak, "limits.measure_step_oracle", "density lost all mass");
    for (double& v : out.p) v /= m;
    return out;
}

double laplace_transform(const GridDensity& density, double x) {
    double acc = 0.0;
    for (size_t i = 0; i < density.p.size(); ++i) {
        double w = (i == 0 || i + 1 == density.p.size()) ? 0.5 : 1.0;
        acc += w * density.p[i] * std::exp(x * density.y(i));
    }
    return acc * density.h;
}

double grid_variance(const GridDensity& density) {
    double acc = 0.0, m = 0.0, mean = 0.0;
    for (size_t i = 0; i < density.p.size(); ++i) {
        double w = (i == 0 || i + 1 == density.p.size()) ? 0.5 : 1.0;
        m += w * density.p[i];
        mean += w * density.p[i] * density.y(i);
    }
    mean /= m;
    for (size_t i = 0; i < density.p.size(); ++i) {
        double w = (i == 0 || i + 1 == density.p.size()) ? 0.5 : 1.0;
        double dy = density.y(i) - mean;
        acc += w * density.p[i] * dy * dy;
    }
    return acc * density.h / (m * density.h);
}

LimitVerdict limit_verdict(const LaguerreFactored& seed, const EvolutionParams& p,
                           const HierarchyParams& hp, MeasureVariant variant) {
    p.validate("limits.limit_verdict");
    hp.validate("limits.limit_verdict");
    seed.validate("limits.limit_verdict");

    EvolutionParams q = p;
    q.theta = theta_from_dimension(hp.N, hp.d);

    LimitVerdict out;
    out.tau = q.tau();

    bool exponential = seed.gammas.empty() || moments(seed, 1)[0] <= 0.0;
    if (exponential) {
        if (!(seed.alpha > 0.0))
            fail(ErrorCode::DegenerateInput, "limits.limit_verdict", "constant seed");
        out.tau_star = (q.delta_pow_lambda() - 1.0) / seed.alpha;
    } else {
        ClassCheck cc = in_class_lambda(seed, q.theta, q.delta, q.lambda);
        if (!cc.member)
            fail(ErrorCode::InvalidArgument, "limits.limit_verdict", "seed not in L(lambda)");
        CriticalSearchOptions cso;
        cso.with_zeta = false;
        CriticalResult cr = find_beta_star(seed, q, cso);
        out.tau_star = cr.tau_star;
    }

    const double rel = out.tau / out.tau_star;
    const double beta = q.beta;

    if (variant == MeasureVariant::Classical) {
        if (!(rel < 1.0 - 1e-12))
            fail(ErrorCode::InvalidArgument, "limits.limit_verdict",
                 "classical normalization needs tau < tau_*");
        if (!(beta > 0.0))
            fail(ErrorCode::InvalidArgument, "limits.limit_verdict",
                 "classical normalization needs tau > 0");
        OrbitOptions oo;
        oo.keep_series = false;
        EvolutionParams qt = q;
        qt.n_max = std::max(q.n_max, 40);
        auto tilde = run_orbit_dispatch(seed, qt, OrbitVariant::QTilde, oo);
        auto plain = run_orbit_dispatch(seed, qt, OrbitVariant::Q, oo);
        out.phi_tilde_limit = tilde.back().phi1;
        double bound = plain.front().phi1;  // phi_0^(1), then multiplied by nu_n
        for (size_t i = 1; i < plain.size(); ++i)
            if (plain[i].nu_valid) bound *= plain[i].nu;
        out.phi_tilde_bound = bound;
        out.kind = LimitKind::Gaussian;
        out.has_variance = true;
        out.variance = 2.0 * hp.N * out.phi_tilde_limit / beta;
        return out;
    }

    if (rel > 1.0 + 1e-12) {
        out.kind = LimitKind::Divergent;
        return out;
    }

    // abnormal normalization: inspect the orbit limit
    OrbitOptions oo;
    oo.keep_series = false;
    EvolutionParams qa = q;
    qa.n_max = std::max(q.n_max, 60);
    auto orbit = run_orbit_dispatch(seed, qa, OrbitVariant::Q, oo);
    double phi_end = orbit.back().phi1;
    if (std::abs(rel - 1.0) <= 1e-12) {
        out.kind = LimitKind::Gaussian;
        out.has_variance = true;
        // transform rate of the limit in measure coordinates: phi1 / beta
        out.variance = 2.0 * hp.N * phi_end / beta;
        return out;
    }
    // subcritical: the inspected c_1 of the normalized transform must decay
    if (!(phi_end < 1.0))
        fail(ErrorCode::Undecided, "limits.limit_verdict",
             "orbit did not exit the corridor within n_max; raise n_max");
    out.kind = LimitKind::Degenerate;
    return out;
}

}  // namespace lagrg
