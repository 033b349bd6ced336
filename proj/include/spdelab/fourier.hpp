#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spdelab/lattice.hpp"
#include "spdelab/martingale_checks.hpp"
#include "spdelab/spde.hpp"

namespace spdelab {

using Complex = std::complex<double>;

/// Coefficients lambda_n for n = -n_max..n_max, stored at index n + n_max.
struct Coefficients {
    int n_max = 0;
    std::vector<Complex> values;

    Complex operator[](int n) const { return values[static_cast<std::size_t>(n + n_max)]; }
    Complex& operator[](int n) { return values[static_cast<std::size_t>(n + n_max)]; }
};

/// lambda_n = h sum_x u(x) exp(-2 pi i n x h). Conjugate symmetry is exact by
/// construction. Throws ConfigError unless 0 <= n_max < m/2.
Coefficients coefficients(std::span<const double> u, int n_max, const GridSpec& spec);

/// Largest n_max accepted for the grid; for odd m the coefficients determine
/// the field exactly.
int max_mode(const GridSpec& spec);

/// f(lambda; x_j) = sum_n lambda_n exp(2 pi i n x_j) on the grid (real part).
Field reconstruct(const Coefficients& lambda, const GridSpec& spec);

struct CoeffSeries {
    int n = 0;
    std::vector<double> times;
    std::vector<Complex> values;
};

/// Coefficient of mode n at each sampled time of a trajectory run with
/// retain_fields. Throws UnavailableError otherwise.
CoeffSeries coefficient_series(const Trajectory& traj, int n, const GridSpec& spec);

enum class EigenConvention {
    paper_literal,  ///< kappa_n = n^2 / 2
    two_pi,         ///< kappa_n = (2 pi n)^2 / 2
};

double drift_rate(int n, EigenConvention convention);

/// R_n(t) = lambda_n(t) - lambda_n(0) + kappa_n int_0^t lambda_n ds with the
/// integral by left-endpoint sums over the sampled times. Throws
/// ConfigError when |n| exceeds max_mode(spec).
CoeffSeries coefficient_drift_residual(const Trajectory& traj, int n, EigenConvention convention,
                                       const GridSpec& spec);

/// F_m(lambda, mu) = int exp(-2 pi i m x) f(lambda, x)^gamma f(mu, x)^gamma dx on
/// the grid. Reconstructions below -1e-9 max|f| throw DomainError; smaller
/// negative artifacts are clamped to 0. Values are capped at `cap` first, which
/// matches the truncated integrand when cap is the truncation level.
Complex f_functional(const Coefficients& lambda, const Coefficients& mu, int mode, double gamma,
                     const GridSpec& spec, double cap = std::numeric_limits<double>::infinity());

/// Realized covariation sum_k dM_m dM_n against the compensator
/// sum_k dt F_{m+n}(lambda(t_k), lambda(t_k)) for one path.
struct QvRelationSample {
    Complex realized;
    Complex predicted;
};

/// Martingale increments dM_m(k) = h sum_x (u_k ^ n)^gamma xi_k(x) exp(-2 pi i m x h)
/// come from the retained slabs. Throws UnavailableError without retain_steps.
QvRelationSample qv_relation_sample(const Trajectory& traj, const SpdeConfig& cfg, int mode_m,
                                    int mode_n);

/// Ensemble check that realized - predicted has zero mean (real and imaginary
/// parts, 3 sigma). Inconclusive when every realized covariation is zero.
CheckReport qv_relation_check(std::span<const QvRelationSample> samples, const std::string& label);

/// Single-path form of the check.
CheckReport qv_relation_check(const Trajectory& traj, const SpdeConfig& cfg, int mode_m,
                              int mode_n);

}  // namespace spdelab
