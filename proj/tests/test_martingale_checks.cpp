#include <cmath>
#include <vector>

#include "doctest.h"
#include "spdelab/errors.hpp"
#include "spdelab/martingale_checks.hpp"
#include "spdelab/noise.hpp"

using namespace spdelab;

namespace {

std::vector<double> normals(std::size_t n, double mean, double sd, std::uint64_t seed) {
    const auto s = derive_stream(seed, 0);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = mean + sd * s.scalar_normal(i);
    return v;
}

}  // namespace

TEST_CASE("verdict strings and combination") {
    for (auto v : {Verdict::pass, Verdict::fail, Verdict::inconclusive}) CHECK(verdict_from_string(to_string(v)) == v);
    CHECK_THROWS_AS(verdict_from_string("maybe"), ConfigError);
    std::vector<CheckLine> lines(2);
    lines[0].verdict = Verdict::pass;
    lines[1].verdict = Verdict::inconclusive;
    CHECK(combine(lines) == Verdict::pass);
    lines[1].verdict = Verdict::fail;
    CHECK(combine(lines) == Verdict::fail);
    CHECK(combine(std::vector<CheckLine>{}) == Verdict::inconclusive);
}

TEST_CASE("hitting bound") {
    const std::vector<double> flat(1000, 1.0);
    const double levels[] = {1.0, 2.0};
    const auto r = check_hitting_bound(flat, 1.0, levels);
    REQUIRE(r.lines.size() == 2);
    CHECK(r.lines[0].upper == 1.0);
    CHECK(r.lines[0].verdict == Verdict::pass);
    CHECK(r.lines[1].upper == 0.5);
    CHECK(r.lines[1].empirical == 0.0);
    CHECK(r.lines[1].verdict == Verdict::pass);
    CHECK(r.verdict == Verdict::pass);

    // Every path reaching 4 violates P(sup >= 4) <= 1/4.
    const std::vector<double> high(1000, 5.0);
    const double four[] = {4.0};
    CHECK(check_hitting_bound(high, 1.0, four).verdict == Verdict::fail);
    CHECK_THROWS_AS(check_hitting_bound(std::vector<double>{}, 1.0, four), ConfigError);
}

TEST_CASE("sup moment bracket") {
    const std::vector<double> one(100, 1.0);
    const auto r = check_sup_moment(one, 1.0, 0.5);
    CHECK(r.lines[0].lower == 1.0);
    CHECK(r.lines[0].upper == 2.0);
    CHECK(r.verdict == Verdict::pass);

    const std::vector<double> four(100, 4.0);
    const auto r4 = check_sup_moment(four, 4.0, 0.5);
    CHECK(r4.lines[0].lower == 2.0);
    CHECK(r4.lines[0].upper == 4.0);
    CHECK(r4.verdict == Verdict::pass);

    const std::vector<double> huge(100, 100.0);
    CHECK(check_sup_moment(huge, 1.0, 0.5).verdict == Verdict::fail);
    CHECK_THROWS_AS(check_sup_moment(one, 1.0, 1.0), ConfigError);
}

TEST_CASE("sup moment with random starts") {
    const std::vector<double> start{1.0, 2.0, 3.0, 4.0};
    CHECK(check_sup_moment_random_start(start, start, 0.5).verdict == Verdict::pass);
    const std::vector<double> below{0.5, 1.0, 1.5, 2.0};
    CHECK(check_sup_moment_random_start(below, start, 0.5).verdict == Verdict::fail);
    CHECK_THROWS_AS(check_sup_moment_random_start(below, std::vector<double>{1.0}, 0.5), ConfigError);
}

TEST_CASE("qv moment") {
    const std::vector<double> zero(50, 0.0), one(50, 1.0);
    const auto r = check_qv_moment(zero, one, 0.5, 1.0);
    CHECK(r.lines[0].empirical == 0.0);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.informational);
    CHECK(r.lines[0].upper == doctest::Approx(3.0));
    const std::vector<double> big(50, 1e4);
    CHECK(check_qv_moment(big, one, 0.5, 1.0, false).verdict == Verdict::fail);
    CHECK_FALSE(check_qv_moment(big, one, 0.5, 1.0, false).informational);
}

TEST_CASE("drift test") {
    const auto x = normals(1000, 1.0, 0.1, 1);
    auto r = drift_test(x, x);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.lines[0].empirical == 0.0);

    std::vector<double> shifted = x;
    const auto jitter = normals(1000, 0.0, 1e-6, 2);
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + 1.0 + jitter[i];
    CHECK(drift_test(shifted, x).verdict == Verdict::fail);

    const auto noise = normals(5000, 0.0, 1.0, 3);
    std::vector<double> noisy = x;
    noisy.resize(5000, 1.0);
    std::vector<double> terminal(5000);
    for (std::size_t i = 0; i < terminal.size(); ++i) terminal[i] = noisy[i] + noise[i];
    CHECK(drift_test(terminal, noisy).verdict == Verdict::pass);
    CHECK_THROWS_AS(drift_test(terminal, x), ConfigError);
    CHECK_THROWS_AS(drift_test(std::vector<double>{}, std::vector<double>{}), ConfigError);
}

TEST_CASE("zero mean line") {
    const std::vector<double> exact(10, 0.0);
    CHECK(zero_mean_line("z", exact).verdict == Verdict::pass);
    const std::vector<double> constant(10, 0.5);
    CHECK(zero_mean_line("z", constant).verdict == Verdict::fail);
    // Rounding-level values with an even smaller spread pass only under a floor.
    const std::vector<double> tiny{1.5e-15, 1.6e-15, 1.7e-15, 1.55e-15};
    CHECK(zero_mean_line("z", tiny).verdict == Verdict::fail);
    const auto floored = zero_mean_line("z", tiny, 1e-12);
    CHECK(floored.verdict == Verdict::pass);
    CHECK(floored.upper == 1e-12);
    CHECK(zero_mean_line("z", constant, 1e-12).verdict == Verdict::fail);
}
