#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace spdelab {

/// Probability levels reported by describe().
inline constexpr std::array<double, 7> kQuantileLevels = {0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};

struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased, zero for count < 2
    double stderr_of_mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::array<double, kQuantileLevels.size()> quantiles{};

    bool operator==(const SampleStats&) const = default;
};

/// Summary statistics over the samples in the order given. Empty input
/// yields a zero-count record.
SampleStats describe(std::span<const double> samples);

/// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::span<const double> samples, double level);

/// sup_y |F_n(y) - F(y)| for the empirical CDF of samples against cdf.
double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// sup_y |F_n(y) - G_k(y)| between two empirical CDFs.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov quantile at the 1% level.
inline constexpr double kKolmogorov99 = 1.6276;

double ks_critical_1pct(std::size_t n);
double ks_critical_1pct(std::size_t n, std::size_t k);

/// Upper edge of the Wilson score interval for k successes in n trials.
double wilson_upper(std::size_t successes, std::size_t trials, double z);

}  // namespace spdelab
