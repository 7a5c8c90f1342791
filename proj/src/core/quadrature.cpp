#include "core/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

#include "core/errors.hpp"

namespace lagrg {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the monic
// generalized Laguerre recurrence (a_k = 2k + alpha + 1, b_k = k (k + alpha)),
// weights are Gamma(alpha+1) times the squared first eigenvector components.
QuadRule build_rule(int n, double alpha) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "quadrature", "n must be >= 1");
    if (alpha <= -1.0) fail(ErrorCode::InvalidArgument, "quadrature", "alpha must be > -1");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        J(k, k) = 2.0 * k + alpha + 1.0;
        if (k > 0) {
            double b = std::sqrt(k * (k + alpha));
            J(k, k - 1) = b;
            J(k - 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        fail(ErrorCode::QuadratureNonconvergent, "quadrature", "eigen decomposition failed");
    double mu0 = std::tgamma(alpha + 1.0);
    QuadRule r;
    r.x.resize(static_cast<size_t>(n));
    r.w.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        r.x[static_cast<size_t>(i)] = es.eigenvalues()(i);
        double q0 = es.eigenvectors()(0, i);
        r.w[static_cast<size_t>(i)] = mu0 * q0 * q0;
    }
    return r;
}

}  // namespace

const QuadRule& gauss_laguerre(int n, double alpha) {
    static std::map<std::pair<int, long long>, QuadRule> cache;
    static std::mutex mtx;
    // key alpha at 1e-12 granularity; callers pass theta-1 which is exact enough
    long long akey = static_cast<long long>(std::llround(alpha * 1e12));
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({n, akey});
    if (it == cache.end()) it = cache.emplace(std::make_pair(n, akey), build_rule(n, alpha)).first;
    return it->second;
}

}  // namespace lagrg
