#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spdelab/lattice.hpp"

namespace spdelab {

/// Named scalar series; times strictly increasing.
struct FunctionalSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;

    /// Throws ConfigError on length mismatch or non-increasing times.
    void validate() const;
};

/// h * sum_x u(x), the discrete integral over the circle.
double total_mass(std::span<const double> u, const GridSpec& spec);

/// (h * sum_x |u(x)|^p)^(1/p). Throws ConfigError for p < 1.
double lp_norm(std::span<const double> u, double p, const GridSpec& spec);

double sup_norm(std::span<const double> u);

/// First sampled time with value >= level, if any.
std::optional<double> hitting_time(const FunctionalSeries& series, double level);

/// (2 - alpha) / (c_alpha (1 - alpha)). Throws DomainError unless
/// 0 < alpha < 1 and c_alpha > 0.
double k_alpha(double alpha, double c_alpha);

/// Space-time integrals of |u1 - u2|^p for one coupled pair, accumulated by
/// left-endpoint Riemann sums on a shared schedule.
class PairDistance {
public:
    PairDistance(const GridSpec& spec, double p);

    /// Adds dt * h * sum_x |a(x) - b(x)|^p.
    void add(std::span<const double> a, std::span<const double> b, double dt);
    double integral() const { return integral_; }
    double order() const { return p_; }

private:
    GridSpec spec_;
    double p_;
    double integral_ = 0.0;
};

/// One pair of fields sampled on the same schedule.
struct SampledPair {
    std::vector<double> times;
    std::vector<std::vector<double>> first;
    std::vector<std::vector<double>> second;
};

/// Left-endpoint space-time integral of |first - second|^p over a sampled
/// pair. Throws ConfigError when the two sides disagree in shape.
double pair_integral(const SampledPair& pair, double p, const GridSpec& spec);

/// Monte Carlo d_{p,alpha}: mean over pairs of I^(alpha/2), then the 1/p-th
/// root, where I is each pair's space-time integral of |u1 - u2|^p.
/// Throws ConfigError unless p >= 1 and 0 < alpha < 2.
double dpalpha_from_integrals(std::span<const double> integrals, double p, double alpha);

/// Same estimator from sampled pairs; all pairs must share the schedule.
double dpalpha_estimate(std::span<const SampledPair> pairs, double p, double alpha,
                        const GridSpec& spec);

}  // namespace spdelab
