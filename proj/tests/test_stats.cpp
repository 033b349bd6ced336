#include <cmath>
#include <vector>

#include "doctest.h"
#include "spdelab/errors.hpp"
#include "spdelab/stats.hpp"

using namespace spdelab;

TEST_CASE("describe") {
    const std::vector<double> v{4, 1, 3, 2, 5};
    const auto s = describe(v);
    CHECK(s.count == 5);
    CHECK(s.mean == 3.0);
    CHECK(s.variance == 2.5);
    CHECK(s.stderr_of_mean == doctest::Approx(std::sqrt(0.5)));
    CHECK(s.min == 1.0);
    CHECK(s.max == 5.0);
    CHECK(s.quantiles[3] == 3.0);
    CHECK(s.quantiles[2] == 2.0);
    CHECK(describe(std::vector<double>{}).count == 0);
    CHECK(describe(std::vector<double>{7.0}).variance == 0.0);
}

TEST_CASE("type 7 quantiles") {
    const std::vector<double> v{10, 20, 30, 40};
    CHECK(quantile(v, 0.0) == 10.0);
    CHECK(quantile(v, 1.0) == 40.0);
    CHECK(quantile(v, 0.5) == 25.0);
    CHECK(quantile(v, 0.25) == doctest::Approx(17.5));
}

TEST_CASE("one-sample KS by hand") {
    // Uniform CDF at samples 0.1, 0.4, 0.9: D = max(1/3 - 0.1, 2/3 - 0.4, 0.4 - 1/3, 0.9 - 2/3, 1 - 0.9).
    const std::vector<double> v{0.9, 0.1, 0.4};
    const double D = ks_one_sample(v, [](double x) { return x; });
    CHECK(D == doctest::Approx(2.0 / 3.0 - 0.4));
    CHECK_THROWS_AS(ks_one_sample(std::vector<double>{}, [](double x) { return x; }), ConfigError);
}

TEST_CASE("two-sample KS by hand") {
    const std::vector<double> a{1, 2, 3, 4}, b{3, 4, 5, 6};
    CHECK(ks_two_sample(a, b) == 0.5);
    CHECK(ks_two_sample(a, a) == 0.0);
    const std::vector<double> c{10, 11};
    CHECK(ks_two_sample(a, c) == 1.0);
    const std::vector<double> tie{2, 2, 2};
    CHECK(ks_two_sample(std::vector<double>{2}, tie) == 0.0);
}

TEST_CASE("critical values and Wilson bound") {
    CHECK(ks_critical_1pct(10000) == doctest::Approx(0.016276));
    CHECK(ks_critical_1pct(100, 100) == doctest::Approx(1.6276 * std::sqrt(0.02)));
    CHECK(wilson_upper(0, 100, 3.0) == doctest::Approx(9.0 / 109.0));
    CHECK(wilson_upper(5, 5, 3.0) == 1.0);
    CHECK(wilson_upper(0, 0, 3.0) == 1.0);
}
