#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "spdelab/errors.hpp"
#include "spdelab/noise.hpp"

using namespace spdelab;

TEST_CASE("philox known answers") {
    // Reference vectors distributed with Random123.
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("open unit map stays inside (0, 1)") {
    CHECK(to_open_unit(0) > 0.0);
    CHECK(to_open_unit(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("normal quantile against boost") {
    const boost::math::normal_distribution<double> n01;
    for (double p : {1e-300, 1e-20, 1e-10, 1e-5, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999999, 1 - 1e-12}) {
        const double ref = boost::math::quantile(n01, p);
        CHECK(normal_quantile(p) == doctest::Approx(ref).epsilon(1e-14).scale(1e-300));
    }
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.2) == doctest::Approx(-normal_quantile(0.8)).epsilon(1e-15));
}

TEST_CASE("streams are deterministic") {
    const auto a = derive_stream(42, 7), b = derive_stream(42, 7);
    for (std::uint64_t k = 0; k < 100; ++k) {
        CHECK(a.scalar_normal(k) == b.scalar_normal(k));
        CHECK(a.lattice_normal(k, 5) == b.lattice_normal(k, 5));
    }
}

TEST_CASE("seed sensitivity") {
    const auto a = derive_stream(42, 0), b = derive_stream(43, 0);
    int equal = 0;
    for (std::uint64_t k = 0; k < 100; ++k) equal += a.scalar_normal(k) == b.scalar_normal(k);
    CHECK(equal < 100);
}

TEST_CASE("paths are uncorrelated") {
    const auto a = derive_stream(9, 0), b = derive_stream(9, 1);
    const int n = 1000000;
    double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
    for (int k = 0; k < n; ++k) {
        const double x = a.scalar_normal(static_cast<std::uint64_t>(k));
        const double y = b.scalar_normal(static_cast<std::uint64_t>(k));
        sx += x, sy += y, sxy += x * y, sxx += x * x, syy += y * y;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    CHECK(std::fabs(corr) < 0.01);
}

TEST_CASE("domains do not overlap") {
    const auto s = derive_stream(5, 3);
    CHECK(s.block(NoiseDomain::lattice, 0, 0) != s.block(NoiseDomain::scalar, 0, 0));
    CHECK(s.block(NoiseDomain::scalar, 0, 0) != s.block(NoiseDomain::aux, 0, 0));
    CHECK(s.block(NoiseDomain::lattice, std::uint64_t{1} << 40, 0) != s.block(NoiseDomain::lattice, 0, 0));
    CHECK_THROWS_AS(derive_stream(1, std::uint64_t{1} << 33), ConfigError);
}

TEST_CASE("slab moments") {
    const auto g = GridSpec::make(64);
    const double dt = 1e-3;
    const auto s = derive_stream(11, 0);
    const int steps = 1000000 / 64 + 1;
    double sum = 0, sq = 0;
    std::size_t n = 0;
    for (int k = 0; k < steps; ++k) {
        for (double v : sample_slab(s, static_cast<std::uint64_t>(k), g, dt)) {
            sum += v, sq += v * v;
            ++n;
        }
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - mean * mean;
    CHECK(std::fabs(var - 0.064) < 0.001);
    CHECK(std::fabs(mean) < 3.0 * std::sqrt(var / static_cast<double>(n)));
    CHECK_THROWS_AS(sample_slab(s, 0, g, 0.0), DomainError);
}

TEST_CASE("distinct cells are independent") {
    const auto g = GridSpec::make(16);
    const auto s = derive_stream(12, 4);
    const int steps = 100000;
    std::vector<double> products;
    double sum = 0, sq = 0;
    for (int k = 0; k < steps; ++k) {
        const auto slab = sample_slab(s, static_cast<std::uint64_t>(k), g, 1.0 / 16);
        const double p = slab[2] * slab[9];
        sum += p, sq += p * p;
    }
    const double mean = sum / steps;
    const double se = std::sqrt((sq / steps - mean * mean) / steps);
    CHECK(std::fabs(mean) < 3.0 * se);
}

TEST_CASE("slab entries equal the scaled lattice normals") {
    const auto g = GridSpec::make(5);
    const auto s = derive_stream(3, 2);
    const auto slab = sample_slab(s, 17, g, 0.01);
    for (int x = 0; x < g.m; ++x) {
        CHECK(slab[static_cast<std::size_t>(x)] ==
              doctest::Approx(std::sqrt(0.01 / g.h) * s.lattice_normal(17, static_cast<std::uint32_t>(x))).epsilon(1e-15));
    }
}

TEST_CASE("aux draws are uniform") {
    const auto s = derive_stream(8, 1);
    AuxDraws d(s, 0);
    const int n = 200000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const double u = d.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::fabs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12 / n));
    AuxDraws again(s, 0);
    AuxDraws other(s, 1);
    CHECK(again.uniform() != other.uniform());
}
