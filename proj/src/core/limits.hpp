#pragma once

#include <vector>

#include "core/critical.hpp"
#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/series.hpp"

namespace lagrg {

struct HierarchyParams {
    int N = 1;        // dimension
    double d = 0.0;   // radial drift parameter, d >= -N
    int depth = 2;    // hierarchy level for grid checks

    void validate(const char* where) const {
        if (N < 1) fail(ErrorCode::InvalidArgument, where, "N must be >= 1");
        if (d < -static_cast<double>(N)) fail(ErrorCode::InvalidArgument, where, "d must be >= -N");
        if (depth < 0) fail(ErrorCode::InvalidArgument, where, "depth must be >= 0");
    }
};

inline double theta_from_dimension(int N, double d) {
    HierarchyParams hp{N, d, 0};
    hp.validate("limits.theta_from_dimension");
    return 0.5 * (N + d);
}

// Radial transform profile of an isotropic measure: F_mu(x) = f((x,x)).
struct IsotropicTransform {
    Series<double> f;
    int N = 1;
};

// E|Y|^2 read off the transform: Laplacian of F at 0 is 2N f'(0).
inline double second_moment(const IsotropicTransform& tr) {
    if (std::abs(tr.f.c[0] - 1.0) > 1e-12)
        fail(ErrorCode::NotNormalized, "limits.second_moment", "transform must have f(0) = 1");
    return 2.0 * tr.N * tr.f.c[1];
}

// ---------------------------------------------------------------------------
// Grid oracle for the measure recursions (N = 1 only): convolve delta copies,
// rescale the argument, multiply by the exponential weight, renormalize.
// The weight exponent carries the radial factor: multiplying a density by
// exp(w (y,y)) acts on the transform profile as exp(4w Delta_{N/2}), so the
// function-side coupling tau corresponds to w = tau/4 (abnormal) and
// w = delta^{-n lambda} tau/4 at level n (classical).
// ---------------------------------------------------------------------------

enum class MeasureVariant { Abnormal, Classical };

struct GridDensity {
    double y0 = 0.0;  // leftmost grid point
    double h = 0.0;   // spacing
    std::vector<double> p;

    double y(size_t i) const { return y0 + h * static_cast<double>(i); }
    double mass() const;
};

GridDensity gaussian_grid(double sigma, double half_width, int n_points);

GridDensity measure_step_oracle(const GridDensity& density, const EvolutionParams& p,
                                const HierarchyParams& hp, MeasureVariant variant, int level);

double laplace_transform(const GridDensity& density, double x);
double grid_variance(const GridDensity& density);

// ---------------------------------------------------------------------------
// Limit verdicts
// ---------------------------------------------------------------------------

enum class LimitKind { Degenerate, Gaussian, Divergent };

inline const char* limit_kind_name(LimitKind k) {
    switch (k) {
        case LimitKind::Degenerate: return "degenerate";
        case LimitKind::Gaussian: return "gaussian";
        case LimitKind::Divergent: return "divergent";
    }
    return "?";
}

struct LimitVerdict {
    LimitKind kind = LimitKind::Degenerate;
    bool has_variance = false;
    double variance = 0.0;
    double tau = 0.0;
    double tau_star = 0.0;
    double phi_tilde_limit = 0.0;   // classical normalization only
    double phi_tilde_bound = 0.0;   // K = phi_0^(1) prod nu_n along the Q orbit
};

LimitVerdict limit_verdict(const LaguerreFactored& seed, const EvolutionParams& p,
                           const HierarchyParams& hp, MeasureVariant variant);

}  // namespace lagrg
