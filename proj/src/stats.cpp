#include "spdelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spdelab/errors.hpp"

namespace spdelab {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double level) {
    if (sorted.empty()) return 0.0;
    const double pos = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

SampleStats describe(std::span<const double> samples) {
    SampleStats s;
    s.count = samples.size();
    if (samples.empty()) return s;

    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : samples) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(s.count - 1);
        s.stderr_of_mean = std::sqrt(s.variance / static_cast<double>(s.count));
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    for (std::size_t i = 0; i < kQuantileLevels.size(); ++i) {
        s.quantiles[i] = sorted_quantile(sorted, kQuantileLevels[i]);
    }
    return s;
}

double quantile(std::span<const double> samples, double level) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted_quantile(sorted, level);
}

double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ConfigError("KS statistic of an empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double i_d = static_cast<double>(i);
        d = std::max({d, (i_d + 1.0) / n - f, f - i_d / n});
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ConfigError("KS statistic of an empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

double ks_critical_1pct(std::size_t n) { return kKolmogorov99 / std::sqrt(static_cast<double>(n)); }

double ks_critical_1pct(std::size_t n, std::size_t k) {
    const double a = static_cast<double>(n);
    const double b = static_cast<double>(k);
    return kKolmogorov99 * std::sqrt((a + b) / (a * b));
}

double wilson_upper(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return 1.0;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    return std::min(1.0, centre + half);
}

}  // namespace spdelab
