#pragma once

#include <vector>

namespace lagrg {

// Generalized Gauss-Laguerre rule for integrals of x^alpha e^{-x} f(x) over
// [0, inf). Tables are computed once per (n, alpha) and shared read-only.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

const QuadRule& gauss_laguerre(int n, double alpha);

}  // namespace lagrg
