#pragma once

#include <cmath>

namespace spdelab {

/// v^p for v >= 0 with exact fast paths for the exponents used most often.
inline double power(double v, double p) {
    if (p == 2.0) return v * v;
    if (p == 4.0) {
        const double v2 = v * v;
        return v2 * v2;
    }
    if (p == 1.0) return v;
    if (p == 3.0) return v * v * v;
    if (p == 1.5) return v * std::sqrt(v);
    return std::pow(v, p);
}

}  // namespace spdelab
