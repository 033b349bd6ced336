#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spdelab/noise.hpp"

namespace spdelab {

// The scalar equation du = u^gamma dW (Ito), its Euler scheme, its exact law
// through the Bessel reduction u^(1-gamma)(t) = Z((gamma-1)^2 t), and the
// limiting density of the rescaled statistic.

enum class SodeScheme { euler, exact_bessel };

struct SodeConfig {
    double gamma = 2.0;
    double u0 = 1.0;
    double dt = 1e-4;
    double horizon = 1.0;
    SodeScheme scheme = SodeScheme::euler;
    /// Multiplier on the Brownian increments; 0 is the variance-0 test hook.
    double noise_scale = 1.0;
    /// Store every k-th value in the path; 0 keeps only the endpoints.
    std::size_t record_every = 0;
    /// Values above this (or non-finite) flag the path as numerically exploded.
    double explode_threshold = 1e150;
    /// When positive, an Euler step is halved (midpoint from the Brownian
    /// bridge) while u^(gamma-1) sqrt(h) exceeds this value. 0 is plain Euler.
    double max_relative_noise = 0.0;

    /// Throws ConfigError unless gamma > 1, u0 > 0 and 0 < dt <= horizon.
    void validate() const;
    /// ceil(horizon / dt); the effective step is horizon / steps().
    std::size_t steps() const;
    double step_size() const;
};

struct SodePath {
    std::vector<double> times;
    std::vector<double> values;
    double running_max = 0.0;
    double terminal = 0.0;
    /// Left-endpoint sum of u^(2 gamma) dt, the increasing process of the path.
    double quadratic_variation = 0.0;
    bool absorbed = false;
    bool exploded = false;
    std::optional<std::size_t> explode_step;
};

/// (2 gamma - 1) / (gamma - 1), always > 2. Throws DomainError for gamma <= 1.
double bessel_dimension(double gamma);

/// u_{k+1} = u_k + u_k^gamma dW_k with dW_k ~ N(0, dt), clamped at 0.
/// Zero is absorbing; overflow flags the path instead of throwing.
SodePath simulate_euler(const SodeConfig& cfg, const NoiseStream& stream);

/// Exact draw of u(t) via the squared Bessel transition. Strictly positive.
double simulate_exact_bessel(const SodeConfig& cfg, const NoiseStream& stream, double t);

/// Map from a squared Bessel value Z^2 to u = (Z^2)^(-1 / (2 (gamma - 1))).
double u_from_squared_bessel(double squared_bessel, double gamma);

enum class DensityVariant {
    paper_literal,  ///< y^(-1/(2 gamma - 2)) e^(-y/2) with the printed normalization
    chi_square,     ///< chi-square density with bessel_dimension(gamma) degrees of freedom
};

/// Limiting density of u^(2(1-gamma))(T) / ((gamma - 1)^2 T). Zero for y < 0.
double asymptotic_pdf(double gamma, double y, DensityVariant variant);

/// Total mass of the printed density; infinite when gamma <= 3/2.
double literal_density_mass(double gamma);

/// CDF of the variant, the literal one renormalized by literal_density_mass.
/// Throws DomainError when the literal density is not normalizable.
double asymptotic_cdf(double gamma, double y, DensityVariant variant);

/// u_T^(2(1-gamma)) / ((gamma - 1)^2 T). Throws DomainError for u_T <= 0 or T <= 0.
double rescaled_statistic(double u_T, double gamma, double T);

}  // namespace spdelab
