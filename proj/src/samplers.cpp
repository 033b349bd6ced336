#include "spdelab/samplers.hpp"

#include <cmath>

#include "spdelab/errors.hpp"

namespace spdelab {

double sample_gamma(double shape, AuxDraws& draws) {
    if (!(shape > 0.0)) throw DomainError("gamma shape must be positive");
    if (shape < 1.0) {
        const double boosted = sample_gamma(shape + 1.0, draws);
        return boosted * std::pow(draws.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = draws.normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = draws.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

long long sample_poisson(double mean, AuxDraws& draws) {
    if (!(mean >= 0.0)) throw DomainError("poisson mean must be nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        long long k = 0;
        double prod = draws.uniform();
        while (prod > limit) {
            ++k;
            prod *= draws.uniform();
        }
        return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = draws.uniform() - 0.5;
        const double v = draws.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<long long>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<long long>(k);
        }
    }
}

double sample_noncentral_chi_square(double dof, double noncentrality, AuxDraws& draws) {
    if (!(dof > 0.0)) throw DomainError("chi-square degrees of freedom must be positive");
    if (!(noncentrality >= 0.0)) throw DomainError("noncentrality must be nonnegative");
    const long long n = sample_poisson(0.5 * noncentrality, draws);
    return 2.0 * sample_gamma(0.5 * dof + static_cast<double>(n), draws);
}

double sample_squared_bessel(double dimension, double x0, double s, AuxDraws& draws) {
    if (s == 0.0) return x0;
    if (!(s > 0.0)) throw DomainError("squared Bessel transition needs s >= 0");
    return s * sample_noncentral_chi_square(dimension, x0 / s, draws);
}

}  // namespace spdelab
