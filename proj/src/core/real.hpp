#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

namespace lagrg {

// Working scalar for long critical orbits. cpp_bin_float_quad carries ~34
// significant decimal digits; the default mode is plain double.
using Extended = boost::multiprecision::cpp_bin_float_quad;

enum class Precision { Double = 0, ExtendedPrec = 1 };

inline double to_double(double x) { return x; }
inline double to_double(const Extended& x) { return static_cast<double>(x); }

template <class R>
bool finite(const R& x) {
    using std::isfinite;
    return isfinite(x);
}

}  // namespace lagrg
