#pragma once

#include "spdelab/noise.hpp"

namespace spdelab {

// Exact variate generators driven by counter-based aux draws, so every sample
// is reproducible from (seed, path) alone.

/// Gamma(shape, 1). Marsaglia-Tsang squeeze for shape >= 1, boosted with
/// U^(1/shape) below 1.
double sample_gamma(double shape, AuxDraws& draws);

/// Poisson(mean). Multiplicative inversion below mean 10, Hormann's PTRS above.
long long sample_poisson(double mean, AuxDraws& draws);

/// Noncentral chi-square with real degrees of freedom, drawn as a Poisson
/// mixture of central chi-squares: chi2(dof + 2N), N ~ Poisson(noncentrality/2).
double sample_noncentral_chi_square(double dof, double noncentrality, AuxDraws& draws);

/// Squared Bessel process of dimension `dimension` started at x0, sampled at
/// time s through its exact transition X_s = s * chi'^2(dimension, x0 / s).
double sample_squared_bessel(double dimension, double x0, double s, AuxDraws& draws);

}  // namespace spdelab
