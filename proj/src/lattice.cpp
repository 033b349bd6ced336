#include "spdelab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spdelab/errors.hpp"

namespace spdelab {

GridSpec GridSpec::make(int cells) {
    if (cells < 4) {
        throw ConfigError("grid needs at least 4 cells, got " + std::to_string(cells));
    }
    return GridSpec{cells, 1.0 / cells};
}

void require_matching(std::span<const double> f, const GridSpec& spec) {
    if (f.size() != spec.size()) {
        throw ConfigError("field length " + std::to_string(f.size()) +
                          " does not match grid of " + std::to_string(spec.m) + " cells");
    }
}

void apply_discrete_laplacian(std::span<const double> f, const GridSpec& spec,
                              std::span<double> out) {
    require_matching(f, spec);
    require_matching(out, spec);
    const double scale = 1.0 / (2.0 * spec.h * spec.h);
    const std::size_t m = spec.size();
    out[0] = (f[1] - 2.0 * f[0] + f[m - 1]) * scale;
#pragma omp simd
    for (std::size_t x = 1; x < m - 1; ++x) {
        out[x] = (f[x + 1] - 2.0 * f[x] + f[x - 1]) * scale;
    }
    out[m - 1] = (f[0] - 2.0 * f[m - 1] + f[m - 2]) * scale;
}

Field apply_discrete_laplacian(std::span<const double> f, const GridSpec& spec) {
    Field out(spec.size());
    apply_discrete_laplacian(f, spec, out);
    return out;
}

double laplacian_eigenvalue(int n, const GridSpec& spec) {
    return (std::cos(2.0 * std::numbers::pi * n * spec.h) - 1.0) / (spec.h * spec.h);
}

CircleDft::CircleDft(const GridSpec& spec) : spec_(spec), roots_(spec.size()) {
    for (int k = 0; k < spec.m; ++k) {
        const double angle = -2.0 * std::numbers::pi * k / spec.m;
        roots_[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
    }
}

std::complex<double> CircleDft::twiddle(long long k) const {
    long long r = k % spec_.m;
    if (r < 0) r += spec_.m;
    return roots_[static_cast<std::size_t>(r)];
}

std::vector<std::complex<double>> CircleDft::forward(std::span<const double> f) const {
    require_matching(f, spec_);
    const std::size_t m = spec_.size();
    std::vector<std::complex<double>> out(m);
    for (std::size_t n = 0; n < m; ++n) {
        std::complex<double> acc{0.0, 0.0};
        std::size_t idx = 0;
        for (std::size_t x = 0; x < m; ++x) {
            acc += f[x] * roots_[idx];
            idx += n;
            if (idx >= m) idx -= m;
        }
        out[n] = acc;
    }
    return out;
}

void CircleDft::inverse(std::span<const std::complex<double>> coeffs, std::span<double> out) const {
    const std::size_t m = spec_.size();
    if (coeffs.size() != m) throw ConfigError("coefficient count does not match grid");
    require_matching(out, spec_);
    for (std::size_t x = 0; x < m; ++x) {
        double acc = 0.0;
        std::size_t idx = 0;
        for (std::size_t n = 0; n < m; ++n) {
            // exp(+2 pi i n x / m) = conj(roots_[n x mod m])
            acc += coeffs[n].real() * roots_[idx].real() + coeffs[n].imag() * roots_[idx].imag();
            idx += x;
            if (idx >= m) idx -= m;
        }
        out[x] = acc / static_cast<double>(m);
    }
}

Field apply_heat_semigroup(std::span<const double> f, double t, const GridSpec& spec) {
    require_matching(f, spec);
    if (!(t >= 0.0)) throw DomainError("heat semigroup needs t >= 0");
    if (t == 0.0) return Field(f.begin(), f.end());

    const CircleDft dft(spec);
    auto coeffs = dft.forward(f);
    for (int n = 0; n < spec.m; ++n) {
        coeffs[static_cast<std::size_t>(n)] *= std::exp(t * laplacian_eigenvalue(n, spec));
    }
    Field out(spec.size());
    dft.inverse(coeffs, out);
    // The kernel is positive, so for nonnegative input any negative output is
    // roundoff of order 1e-17.
    if (std::all_of(f.begin(), f.end(), [](double v) { return v >= 0.0; })) {
        for (double& v : out) v = std::max(v, 0.0);
    }
    return out;
}

double heat_kernel(double t, double x) {
    if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
    x -= std::floor(x);
    constexpr double kTol = 1e-14;
    if (t < kHeatKernelCrossover) {
        const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
        double sum = std::exp(-x * x / (2.0 * t)) + std::exp(-(x - 1.0) * (x - 1.0) / (2.0 * t));
        for (int k = 1;; ++k) {
            const double a = x + k;
            const double b = x - 1.0 - k;
            const double term = std::exp(-a * a / (2.0 * t)) + std::exp(-b * b / (2.0 * t));
            sum += term;
            if (term < kTol * 1e-3) break;
        }
        return norm * sum;
    }
    double sum = 1.0;
    for (int n = 1;; ++n) {
        const double decay = std::exp(-2.0 * std::numbers::pi * std::numbers::pi * n * n * t);
        if (decay < kTol) break;
        sum += 2.0 * decay * std::cos(2.0 * std::numbers::pi * n * x);
    }
    return std::max(sum, 0.0);
}

CyclicHeatSolver::CyclicHeatSolver(const GridSpec& spec, double dt)
    : m_(spec.m), dt_(dt), cprime_(spec.size()), denom_(spec.size()), z_(spec.size()) {
    if (!(dt > 0.0)) throw DomainError("implicit solve needs dt > 0");
    const double diag = 1.0 + dt / (spec.h * spec.h);
    off_ = -dt / (2.0 * spec.h * spec.h);
    gamma_ = -diag;

    std::vector<double> bb(spec.size(), diag);
    bb.front() = diag - gamma_;
    bb.back() = diag - off_ * off_ / gamma_;

    denom_[0] = bb[0];
    cprime_[0] = off_ / bb[0];
    for (int i = 1; i < m_; ++i) {
        denom_[i] = bb[i] - off_ * cprime_[i - 1];
        cprime_[i] = off_ / denom_[i];
    }
    std::fill(z_.begin(), z_.end(), 0.0);
    z_.front() = gamma_;
    z_.back() = off_;
    thomas(z_);
    z_denominator_ = 1.0 + z_.front() + off_ * z_.back() / gamma_;
}

void CyclicHeatSolver::thomas(std::span<double> x) const {
    x[0] /= denom_[0];
    for (int i = 1; i < m_; ++i) {
        x[i] = (x[i] - off_ * x[i - 1]) / denom_[i];
    }
    for (int i = m_ - 2; i >= 0; --i) {
        x[i] -= cprime_[i] * x[i + 1];
    }
}

void CyclicHeatSolver::solve(std::span<double> rhs) const {
    if (rhs.size() != static_cast<std::size_t>(m_)) throw ConfigError("rhs length mismatch");
    thomas(rhs);
    const double fact = (rhs.front() + off_ * rhs.back() / gamma_) / z_denominator_;
    for (int i = 0; i < m_; ++i) rhs[i] -= fact * z_[i];
}

}  // namespace spdelab
