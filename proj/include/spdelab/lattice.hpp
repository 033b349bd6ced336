#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spdelab {

/// Uniform grid on the unit circle [0,1) with 0 identified with 1.
struct GridSpec {
    int m = 0;       ///< number of cells, m >= 4
    double h = 0.0;  ///< spacing 1/m

    /// Throws ConfigError for m < 4.
    static GridSpec make(int cells);

    std::size_t size() const { return static_cast<std::size_t>(m); }
    double position(int cell) const { return cell * h; }
};

/// One time slice of a lattice field; index x is read modulo m.
using Field = std::vector<double>;

/// Throws ConfigError unless f.size() == spec.m.
void require_matching(std::span<const double> f, const GridSpec& spec);

/// (f(x+1) - 2 f(x) + f(x-1)) / (2 h^2) with cyclic indexing. Row sums of
/// the operator vanish, so the output sums to zero.
Field apply_discrete_laplacian(std::span<const double> f, const GridSpec& spec);
void apply_discrete_laplacian(std::span<const double> f, const GridSpec& spec,
                              std::span<double> out);

/// Eigenvalue of the discrete Laplacian for Fourier mode n:
/// (cos(2 pi n h) - 1) / h^2, which lies in [-2/h^2, 0].
double laplacian_eigenvalue(int n, const GridSpec& spec);

/// Discrete Fourier transform on the m-cell circle with cached twiddles.
/// forward: F_n = sum_x f_x exp(-2 pi i n x / m), n = 0..m-1.
/// inverse: f_x = (1/m) sum_n F_n exp(2 pi i n x / m), real part.
class CircleDft {
public:
    explicit CircleDft(const GridSpec& spec);

    std::vector<std::complex<double>> forward(std::span<const double> f) const;
    void inverse(std::span<const std::complex<double>> coeffs, std::span<double> out) const;

    /// exp(-2 pi i k / m) for any integer k.
    std::complex<double> twiddle(long long k) const;
    const GridSpec& grid() const { return spec_; }

private:
    GridSpec spec_;
    std::vector<std::complex<double>> roots_;
};

/// exp(t A) f through the exact eigen-decomposition of the discrete
/// Laplacian. Mass is preserved and t = 0 is the identity. Throws
/// DomainError for t < 0.
Field apply_heat_semigroup(std::span<const double> f, double t, const GridSpec& spec);

/// Continuum heat kernel p_t(x) on the circle for the generator (1/2) d^2/dx^2.
/// Uses the image sum below t = 1/(4 pi) and the Fourier series above it.
/// Throws DomainError for t <= 0.
double heat_kernel(double t, double x);

/// Crossover time between the image-sum and Fourier-series evaluations.
inline constexpr double kHeatKernelCrossover = 0.07957747154594767;  // 1/(4 pi)

/// Solves (I - dt A) x = b for the cyclic tridiagonal discrete Laplacian A
/// with a Sherman-Morrison corrected Thomas sweep. Factorization is done once.
class CyclicHeatSolver {
public:
    CyclicHeatSolver(const GridSpec& spec, double dt);

    /// Overwrites rhs with the solution.
    void solve(std::span<double> rhs) const;

    double dt() const { return dt_; }

private:
    int m_;
    double dt_;
    double off_;    // off-diagonal entry, -dt / (2 h^2)
    double gamma_;  // Sherman-Morrison shift
    std::vector<double> cprime_;
    std::vector<double> denom_;
    std::vector<double> z_;  // modified-system solution for the correction vector
    double z_denominator_;

    void thomas(std::span<double> x) const;
};

}  // namespace spdelab
