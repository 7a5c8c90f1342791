#include "core/critical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <tuple>

namespace lagrg {

std::vector<double> numeric_linearization_spectrum(const FixedPoint& fp, const EvolutionParams& p,
                                                   int kmax) {
    if (kmax < 0 || 2 * kmax > p.K)
        fail(ErrorCode::InvalidArgument, "critical.numeric_spectrum", "kmax out of range");
    const int K = p.K;
    Series<double> fstar = exponential_series(fp.u_star, K);
    for (double& x : fstar.c) x *= fp.C_star;
    Series<double> inv_fstar = reciprocal(fstar);

    // column j: coefficients 0..kmax of T'[f_*](f_* z^j) / f_*
    Eigen::MatrixXd M(kmax + 1, kmax + 1);
    for (int j = 0; j <= kmax; ++j) {
        Series<double> h = fstar;
        // shift by z^j
        Series<double> hj(K);
        for (int k = K; k >= j; --k) hj.c[k] = h.c[k - j];
        Series<double> img = linearized_step(fp, hj, p);
        Series<double> in_basis = mul(img, inv_fstar);
        for (int i = 0; i <= kmax; ++i) M(i, j) = in_basis.c[i];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        fail(ErrorCode::InvalidArgument, "critical.numeric_spectrum", "eigensolver failed");
    std::vector<double> ev;
    ev.reserve(static_cast<size_t>(kmax) + 1);
    for (int i = 0; i <= kmax; ++i) ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

namespace {

// First exit of phi1 from the corridor (1, Phi1): below one is a permanent
// subcritical certificate, reaching Phi1 a supercritical one.
template <class R>
std::pair<Verdict, int> classify_orbit(const LaguerreFactored& seed, const EvolutionParams& p,
                                       double beta, double Phi1, int horizon) {
    const StepConstants<R> k = StepConstants<R>::make([&] {
        EvolutionParams q = p;
        q.beta = beta;
        return q;
    }());
    LaguerreFactored s0 = scale_seed(seed, beta);
    Series<R> cur = to_series<R>(s0, p.K);
    normalize_at_zero(cur);
    const R one(1), phi_top(Phi1);
    for (int n = 0; n <= horizon; ++n) {
        if (n > 0) {
            Series<R> next = step_Q(cur, k);
            normalize_at_zero(next);
            cur = next;
        }
        R phi1 = cur.c[1];  // c0 == 1, so (log f)'(0) = c1
        if (phi1 < one) return {Verdict::Sub, n};
        if (phi1 >= phi_top) return {Verdict::Super, n};
    }
    return {Verdict::Undecided, horizon};
}

std::pair<Verdict, int> classify(const LaguerreFactored& seed, const EvolutionParams& p, double beta,
                                 double Phi1, int horizon, bool extended) {
    return extended ? classify_orbit<Extended>(seed, p, beta, Phi1, horizon)
                    : classify_orbit<double>(seed, p, beta, Phi1, horizon);
}

}  // namespace

double find_zeta_star(const LaguerreFactored& seed, double beta, const EvolutionParams& p,
                      const CriticalSearchOptions& opt) {
    using std::exp;
    using std::log;
    using std::pow;
    p.validate("critical.find_zeta_star");
    if (p.theta == 0.0) return 1.0;  // C_n = C_{n-1}^delta forces C_0 = 1

    const int N = opt.corridor_n;
    EvolutionParams q = p;
    q.beta = beta;
    q.precision = Precision::ExtendedPrec;  // the zeta condition number is delta^n
    OrbitOptions oo;
    oo.n_steps = N;
    oo.keep_series = false;
    auto records = run_orbit<Extended>(seed, q, OrbitVariant::Q, oo);

    // log C_n(zeta) = delta^n log zeta + S_n with S_n the C-accumulation of the
    // C_0 = 1 orbit; the normalized orbit itself does not depend on C_0.
    Extended logC_seed = log(Extended(seed.C));
    std::vector<Extended> S(records.size());
    std::vector<Extended> dpow(records.size());
    for (size_t n = 0; n < records.size(); ++n) {
        dpow[n] = pow(Extended(p.delta), static_cast<int>(n));
        S[n] = records[n].log_C - dpow[n] * logC_seed;
    }

    const Extended log_zeta_minus =
        -Extended(p.theta) * (Extended(1) + 2 * Extended(p.lambda)) /
        (4 * Extended(p.delta - 1)) * log(Extended(p.delta));

    // exit of log C_n from [log zeta^-, 0]: +1 up, -1 down, 0 stays inside
    auto exit_dir = [&](const Extended& logz, int* step) {
        for (size_t n = 1; n < S.size(); ++n) {
            Extended x = dpow[n] * logz + S[n];
            if (x > Extended(0)) {
                if (step) *step = static_cast<int>(n);
                return +1;
            }
            if (x < log_zeta_minus) {
                if (step) *step = static_cast<int>(n);
                return -1;
            }
        }
        if (step) *step = -1;
        return 0;
    };

    Extended lo = log_zeta_minus, hi(0);
    if (exit_dir(hi, nullptr) < 0 || exit_dir(lo, nullptr) > 0)
        fail(ErrorCode::NoBracket, "critical.find_zeta_star",
             "corridor endpoints do not classify up/down");
    // For theta > 0 the endpoints classify strictly: C_n grows from zeta = 1
    // and sinks from zeta = zeta^-.
    while (hi - lo > Extended(opt.zeta_tol_log)) {
        Extended mid = (hi + lo) / 2;
        int dir = exit_dir(mid, nullptr);
        if (dir == 0) {
            // still inside the corridor at the horizon: bisect on the position
            // of the last iterate relative to the corridor midline
            Extended xN = dpow.back() * mid + S.back();
            dir = xN > log_zeta_minus / 2 ? +1 : -1;
        }
        if (dir > 0)
            hi = mid;
        else
            lo = mid;
    }
    Extended log_zeta = (hi + lo) / 2;

    // verify the corridor at the returned value
    for (size_t n = 1; n < S.size(); ++n) {
        Extended x = dpow[n] * log_zeta + S[n];
        if (x > Extended(1e-6) || x < log_zeta_minus + log(Extended(1) - Extended(1e-6)))
            fail(ErrorCode::CorridorViolation, "critical.find_zeta_star",
                 "C_n left the corridor at step " + std::to_string(n));
    }
    return to_double(exp(log_zeta));
}

CriticalResult find_beta_star(const LaguerreFactored& seed, const EvolutionParams& p,
                              const CriticalSearchOptions& opt) {
    p.validate("critical.find_beta_star");
    seed.validate("critical.find_beta_star");
    CriticalResult res;
    double dl1 = p.delta_pow_lambda() - 1.0;

    if (seed.gammas.empty() || moments(seed, 1)[0] <= 0.0) {
        // exponential family: closed-form threshold tau_* = (d^l - 1)/alpha
        if (!(seed.alpha > 0.0))
            fail(ErrorCode::DegenerateInput, "critical.find_beta_star",
                 "constant seed has no threshold");
        res.oracle_path = true;
        res.beta_star = 1.0 / seed.alpha;
        res.tau_star = dl1 / seed.alpha;
        res.bracket_lo = res.bracket_hi = res.beta_star;
        if (opt.with_zeta) {
            EvolutionParams q = p;
            q.beta = res.beta_star;
            res.zeta_star = p.theta > 0.0 ? c_of_tau(q, seed.alpha) : 1.0;
            res.zeta_minus =
                std::pow(static_cast<double>(p.delta),
                         -p.theta * (1.0 + 2.0 * p.lambda) / (4.0 * (p.delta - 1.0)));
        }
        return res;
    }

    ClassCheck cc = in_class_lambda(seed, p.theta, p.delta, p.lambda);
    if (!cc.member)
        fail(ErrorCode::InvalidArgument, "critical.find_beta_star",
             "seed is not in L(lambda): ratio " + std::to_string(cc.ratio1) + " > bound " +
                 std::to_string(cc.bound1));
    res.constants = cc.k;
    double m1 = moments(seed, 1)[0];
    double lo = 1.0 / (seed.alpha + m1);          // phi_0^(1) = 1 here
    double hi = cc.k.Phi1 / (seed.alpha + m1);    // phi_0^(1) = Phi^(1) here

    int horizon = p.n_max;
    auto run = [&](double beta, bool extended) {
        auto [v, step] = classify(seed, p, beta, cc.k.Phi1, horizon, extended);
        while (v == Verdict::Undecided && horizon < opt.horizon_cap) {
            horizon = std::min(opt.horizon_cap, horizon * 2);
            std::tie(v, step) = classify(seed, p, beta, cc.k.Phi1, horizon, extended);
        }
        res.trace.push_back({beta, v, step});
        return v;
    };

    Verdict vlo = run(lo, false);
    Verdict vhi = run(hi, false);
    if (vlo != Verdict::Sub || vhi != Verdict::Super)
        fail(ErrorCode::NoBracket, "critical.find_beta_star",
             "seed bracket endpoints did not classify sub/super");
    res.bracket_lo = lo;
    res.bracket_hi = hi;

    bool undecided_residue = false;
    while (hi - lo > opt.beta_tol) {
        bool extended = (hi - lo) < opt.extended_switch;
        double mid = 0.5 * (lo + hi);
        Verdict v = run(mid, extended);
        if (v == Verdict::Sub) {
            lo = mid;
            res.bracket_lo = mid;
        } else if (v == Verdict::Super) {
            hi = mid;
            res.bracket_hi = mid;
        } else {
            // horizon cap reached: the midpoint sits in D_n, so beta_* is not
            // below it; shrink from above and report the residue
            hi = mid;
            undecided_residue = true;
        }
    }
    res.beta_star = 0.5 * (lo + hi);
    res.tau_star = res.beta_star * dl1;
    if (undecided_residue && res.bracket_hi - res.bracket_lo > 16 * opt.beta_tol)
        fail(ErrorCode::Undecided, "critical.find_beta_star",
             "horizon cap left undecided verdicts across the final bracket");
    if (opt.with_zeta) {
        res.zeta_star = find_zeta_star(seed, res.beta_star, p, opt);
        res.zeta_minus = std::pow(static_cast<double>(p.delta),
                                  -p.theta * (1.0 + 2.0 * p.lambda) / (4.0 * (p.delta - 1.0)));
    }
    return res;
}

}  // namespace lagrg
