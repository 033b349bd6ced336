#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <algorithm>
#include <vector>

#include "doctest.h"
#include "spdelab/samplers.hpp"
#include "spdelab/stats.hpp"

using namespace spdelab;

namespace {

std::vector<double> draw(std::size_t n, double (*fn)(AuxDraws&, double, double), double a, double b) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = derive_stream(77, i);
        AuxDraws d(s, 0);
        out.push_back(fn(d, a, b));
    }
    return out;
}

}  // namespace

TEST_CASE("gamma sampler matches the boost CDF") {
    for (double shape : {0.3, 1.0, 1.5, 7.0}) {
        const auto x = draw(
            20000, [](AuxDraws& d, double k, double) { return sample_gamma(k, d); }, shape, 0.0);
        const boost::math::gamma_distribution<double> ref(shape);
        const double D = ks_one_sample(x, [&](double v) { return boost::math::cdf(ref, v); });
        CHECK(D < ks_critical_1pct(x.size()));
    }
}

TEST_CASE("poisson sampler moments and CDF") {
    for (double mean : {0.5, 4.0, 30.0, 400.0}) {
        const auto x = draw(
            20000, [](AuxDraws& d, double mu, double) { return static_cast<double>(sample_poisson(mu, d)); },
            mean, 0.0);
        const auto st = describe(x);
        CHECK(std::fabs(st.mean - mean) < 4.0 * std::sqrt(mean / 20000.0));
        CHECK(st.variance == doctest::Approx(mean).epsilon(0.05));
        // Discrete KS against the CDF at the integers (conservative for lattice laws).
        const boost::math::poisson_distribution<double> ref(mean);
        std::vector<double> sorted = x;
        std::sort(sorted.begin(), sorted.end());
        double D = 0.0;
        for (double k = sorted.front(); k <= sorted.back(); k += 1.0) {
            const double emp = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), k) - sorted.begin()) /
                               static_cast<double>(sorted.size());
            D = std::max(D, std::fabs(emp - boost::math::cdf(ref, k)));
        }
        CHECK(D < ks_critical_1pct(x.size()));
    }
}

TEST_CASE("noncentral chi-square sampler matches the boost CDF") {
    for (auto [dof, nc] : {std::pair{3.0, 0.5}, std::pair{3.0, 40.0}, std::pair{2.5, 4.0}}) {
        const auto x = draw(
            20000, [](AuxDraws& d, double k, double l) { return sample_noncentral_chi_square(k, l, d); }, dof, nc);
        const boost::math::non_central_chi_squared_distribution<double> ref(dof, nc);
        const double D = ks_one_sample(x, [&](double v) { return boost::math::cdf(ref, v); });
        CHECK(D < ks_critical_1pct(x.size()));
    }
}

TEST_CASE("squared Bessel transition scales the noncentral chi-square") {
    const double delta = 3.0, x0 = 2.0, s = 0.7;
    const auto x = draw(
        20000, [](AuxDraws& d, double a, double b) { return sample_squared_bessel(3.0, a, b, d); }, x0, s);
    const boost::math::non_central_chi_squared_distribution<double> ref(delta, x0 / s);
    const double D = ks_one_sample(x, [&](double v) { return boost::math::cdf(ref, v / s); });
    CHECK(D < ks_critical_1pct(x.size()));
    // E[X_s] = x0 + delta s.
    const auto st = describe(x);
    CHECK(std::fabs(st.mean - (x0 + delta * s)) < 4.0 * st.stderr_of_mean);
}
