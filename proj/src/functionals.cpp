#include "spdelab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "spdelab/errors.hpp"
#include "spdelab/power.hpp"

namespace spdelab {

void FunctionalSeries::validate() const {
    if (times.size() != values.size()) throw ConfigError("series '" + name + "': length mismatch");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw ConfigError("series '" + name + "': times must be strictly increasing");
        }
    }
}

double total_mass(std::span<const double> u, const GridSpec& spec) {
    require_matching(u, spec);
    double sum = 0.0;
    for (double v : u) sum += v;
    return spec.h * sum;
}

double lp_norm(std::span<const double> u, double p, const GridSpec& spec) {
    require_matching(u, spec);
    if (!(p >= 1.0)) throw ConfigError("L^p norm needs p >= 1");
    double sum = 0.0;
    for (double v : u) sum += power(std::fabs(v), p);
    return power(spec.h * sum, 1.0 / p);
}

double sup_norm(std::span<const double> u) {
    double s = 0.0;
    for (double v : u) s = std::max(s, std::fabs(v));
    return s;
}

std::optional<double> hitting_time(const FunctionalSeries& series, double level) {
    for (std::size_t i = 0; i < series.values.size() && i < series.times.size(); ++i) {
        if (series.values[i] >= level) return series.times[i];
    }
    return std::nullopt;
}

double k_alpha(double alpha, double c_alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("K(alpha) needs 0 < alpha < 1");
    if (!(c_alpha > 0.0)) throw DomainError("K(alpha) needs c(alpha) > 0");
    return (2.0 - alpha) / (c_alpha * (1.0 - alpha));
}

PairDistance::PairDistance(const GridSpec& spec, double p) : spec_(spec), p_(p) {
    if (!(p >= 1.0)) throw ConfigError("pair distance needs p >= 1");
}

void PairDistance::add(std::span<const double> a, std::span<const double> b, double dt) {
    require_matching(a, spec_);
    require_matching(b, spec_);
    double sum = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) sum += power(std::fabs(a[x] - b[x]), p_);
    integral_ += dt * spec_.h * sum;
}

double pair_integral(const SampledPair& pair, double p, const GridSpec& spec) {
    const std::size_t n = pair.times.size();
    if (pair.first.size() != n || pair.second.size() != n) {
        throw ConfigError("sampled pair: fields do not match the schedule");
    }
    PairDistance acc(spec, p);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        acc.add(pair.first[k], pair.second[k], pair.times[k + 1] - pair.times[k]);
    }
    return acc.integral();
}

double dpalpha_from_integrals(std::span<const double> integrals, double p, double alpha) {
    if (!(p >= 1.0)) throw ConfigError("d_{p,alpha} needs p >= 1");
    if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("d_{p,alpha} needs 0 < alpha < 2");
    if (integrals.empty()) throw ConfigError("d_{p,alpha} of an empty collection");
    double sum = 0.0;
    for (double v : integrals) sum += std::pow(v, 0.5 * alpha);
    return std::pow(sum / static_cast<double>(integrals.size()), 1.0 / p);
}

double dpalpha_estimate(std::span<const SampledPair> pairs, double p, double alpha,
                        const GridSpec& spec) {
    if (pairs.empty()) throw ConfigError("d_{p,alpha} of an empty collection");
    std::vector<double> integrals;
    integrals.reserve(pairs.size());
    for (const auto& pair : pairs) {
        if (pair.times != pairs.front().times) {
            throw ConfigError("d_{p,alpha}: pairs use different step schedules");
        }
        integrals.push_back(pair_integral(pair, p, spec));
    }
    return dpalpha_from_integrals(integrals, p, alpha);
}

}  // namespace spdelab
