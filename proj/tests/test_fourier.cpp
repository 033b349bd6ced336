#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "spdelab/errors.hpp"
#include "spdelab/fourier.hpp"

using namespace spdelab;

namespace {

Field sampled(const GridSpec& g, double (*fn)(double)) {
    Field f(g.size());
    for (int x = 0; x < g.m; ++x) f[static_cast<std::size_t>(x)] = fn(g.position(x));
    return f;
}

SpdeConfig fourier_config(int m) {
    SpdeConfig cfg;
    cfg.grid = GridSpec::make(m);
    cfg.dt = 1e-4;
    cfg.horizon = 0.01;
    cfg.trunc = 10.0;
    cfg.u0 = sampled(cfg.grid, [](double x) { return 1.0 + 0.5 * std::cos(2 * std::numbers::pi * x); });
    cfg.retain_fields = true;
    cfg.retain_steps = true;
    return cfg;
}

}  // namespace

TEST_CASE("coefficients of simple fields") {
    const auto g = GridSpec::make(16);
    const auto c = coefficients(Field(16, 2.5), 7, g);
    CHECK(std::abs(c[0] - Complex(2.5)) < 1e-14);
    for (int n = 1; n <= 7; ++n) CHECK(std::abs(c[n]) < 1e-14);

    const auto cosine = coefficients(sampled(g, [](double x) { return 1.0 + std::cos(2 * std::numbers::pi * x); }), 3, g);
    CHECK(std::abs(cosine[0] - Complex(1.0)) < 1e-14);
    CHECK(std::abs(cosine[1] - Complex(0.5)) < 1e-14);
    CHECK(std::abs(cosine[-1] - Complex(0.5)) < 1e-14);
    CHECK(std::abs(cosine[2]) < 1e-14);

    CHECK_THROWS_AS(coefficients(Field(16, 1.0), 8, g), ConfigError);
    CHECK_THROWS_AS(coefficients(Field(16, 1.0), -1, g), ConfigError);
    CHECK_THROWS_AS(coefficients(Field(15, 1.0), 3, g), ConfigError);
    CHECK(max_mode(g) == 7);
    CHECK(max_mode(GridSpec::make(65)) == 32);
}

TEST_CASE("Parseval and exact reconstruction on odd grids") {
    const auto g = GridSpec::make(33);
    const auto u = sampled(g, [](double x) { return 2.0 + std::sin(6 * x) + std::exp(std::cos(2 * std::numbers::pi * x)); });
    const auto c = coefficients(u, max_mode(g), g);
    double energy = 0.0, spectral = 0.0;
    for (double v : u) energy += g.h * v * v;
    for (const auto& v : c.values) spectral += std::norm(v);
    CHECK(spectral == doctest::Approx(energy).epsilon(1e-13));
    const auto back = reconstruct(c, g);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-13));
}

TEST_CASE("F functional") {
    const auto g = GridSpec::make(17);
    const auto c = coefficients(Field(17, 1.5), max_mode(g), g);
    CHECK(std::abs(f_functional(c, c, 0, 2.0, g) - Complex(std::pow(1.5, 4.0))) < 1e-12);
    for (int m : {1, 3, -2}) CHECK(std::abs(f_functional(c, c, m, 2.0, g)) < 1e-12);

    // gamma = 1 turns F_m into a convolution of coefficients.
    const auto u = sampled(g, [](double x) { return 1.0 + 0.4 * std::cos(2 * std::numbers::pi * x) + 0.2 * std::sin(4 * std::numbers::pi * x); });
    const auto v = sampled(g, [](double x) { return 2.0 + 0.3 * std::sin(2 * std::numbers::pi * x); });
    const auto lu = coefficients(u, max_mode(g), g), lv = coefficients(v, max_mode(g), g);
    for (int m : {0, 1, 2, 3}) {
        // int e^{-2 pi i m x} f g dx = sum over a + b = m of lambda_a mu_b.
        Complex conv{};
        for (int a = -lu.n_max; a <= lu.n_max; ++a) {
            const int b = m - a;
            if (std::abs(b) <= lv.n_max) conv += lu[a] * lv[b];
        }
        CHECK(std::abs(f_functional(lu, lv, m, 1.0, g) - conv) < 1e-12);
    }

    // |F_m| <= F_0 for a nonnegative integrand.
    const auto f0 = f_functional(lu, lu, 0, 2.0, g);
    CHECK(std::abs(f0.imag()) < 1e-12);
    for (int m = 1; m < 6; ++m) CHECK(std::abs(f_functional(lu, lu, m, 2.0, g)) <= f0.real() + 1e-12);

    // Capping matches the truncated integrand.
    CHECK(std::abs(f_functional(c, c, 0, 2.0, g, 1.0) - Complex(1.0)) < 1e-12);

    Coefficients broken = lu;
    broken[1] += Complex(0.0, 0.1);
    CHECK_THROWS_AS(f_functional(broken, lu, 0, 2.0, g), DomainError);
    const auto neg = coefficients(sampled(g, [](double x) { return std::cos(2 * std::numbers::pi * x); }), max_mode(g), g);
    CHECK_THROWS_AS(f_functional(neg, neg, 0, 2.0, g), DomainError);
}

TEST_CASE("coefficient series and drift residual") {
    auto cfg = fourier_config(17);
    cfg.retain_steps = false;
    const auto t = simulate_truncated(cfg, derive_stream(3, 0));
    const auto series = coefficient_series(t, 1, cfg.grid);
    CHECK(series.values.size() == t.times.size());
    CHECK(std::abs(series.values.front() - Complex(0.25)) < 1e-14);

    // n = 0: the residual is the mass increment under both conventions.
    for (auto conv : {EigenConvention::paper_literal, EigenConvention::two_pi}) {
        const auto r0 = coefficient_drift_residual(t, 0, conv, cfg.grid);
        for (std::size_t j = 0; j < t.times.size(); ++j) {
            CHECK(std::abs(r0.values[j] - Complex(t.mass[j] - t.mass.front())) < 1e-13);
        }
    }
    CHECK(drift_rate(1, EigenConvention::paper_literal) == 0.5);
    CHECK(drift_rate(2, EigenConvention::two_pi) == doctest::Approx(8 * std::numbers::pi * std::numbers::pi));
    CHECK_THROWS_AS(coefficient_series(t, 9, cfg.grid), ConfigError);

    auto no_fields = cfg;
    no_fields.retain_fields = false;
    CHECK_THROWS_AS(coefficient_series(simulate_truncated(no_fields, derive_stream(3, 0)), 1, cfg.grid), UnavailableError);
}

TEST_CASE("zero-noise drift residual shrinks with dt") {
    std::vector<double> residuals;
    for (double dt : {2e-4, 1e-4, 5e-5}) {
        auto cfg = fourier_config(65);
        cfg.noise_scale = 0.0;
        cfg.retain_steps = false;
        cfg.dt = dt;
        cfg.horizon = 0.02;
        const auto t = simulate_truncated(cfg, derive_stream(1, 0));
        residuals.push_back(std::abs(coefficient_drift_residual(t, 1, EigenConvention::two_pi, cfg.grid).values.back()));
    }
    MESSAGE("two-pi residuals " << residuals[0] << " " << residuals[1] << " " << residuals[2]);
    CHECK(residuals[1] < residuals[0]);
    CHECK(residuals[2] < residuals[1]);
    CHECK(residuals[2] < 1e-3);
}

TEST_CASE("qv relation sample") {
    auto cfg = fourier_config(17);
    const auto t = simulate_truncated(cfg, derive_stream(4, 0));
    const auto s = qv_relation_sample(t, cfg, 1, -1);
    CHECK(s.realized.real() > 0.0);
    CHECK(std::fabs(s.realized.imag()) < 1e-15);
    CHECK(s.predicted.real() > 0.0);

    // Odd grids use the field directly; the Fourier route gives the same compensator.
    Complex route{};
    for (std::size_t k = 0; k < t.steps_run; ++k) {
        const auto lambda = coefficients(t.step_fields[k], max_mode(cfg.grid), cfg.grid);
        route += t.step_dt * f_functional(lambda, lambda, 0, cfg.gamma, cfg.grid, cfg.trunc);
    }
    CHECK(std::abs(route - s.predicted) < 1e-10 * std::abs(route));

    // (0, 0) reduces to realized mass QV against the accumulated QV.
    const auto s0 = qv_relation_sample(t, cfg, 0, 0);
    CHECK(s0.predicted.real() == doctest::Approx(t.qv.back()).epsilon(1e-12));

    auto quiet = cfg;
    quiet.noise_scale = 0.0;
    const auto tq = simulate_truncated(quiet, derive_stream(4, 0));
    CHECK(qv_relation_check(tq, quiet, 1, -1).verdict == Verdict::inconclusive);

    auto lean = cfg;
    lean.retain_steps = false;
    CHECK_THROWS_AS(qv_relation_sample(simulate_truncated(lean, derive_stream(4, 0)), lean, 1, -1), UnavailableError);
    CHECK_THROWS_AS(qv_relation_check(std::vector<QvRelationSample>{}, "x"), ConfigError);
}

TEST_CASE("qv relation holds in ensemble mean") {
    auto cfg = fourier_config(17);
    cfg.horizon = 0.02;
    std::vector<QvRelationSample> samples;
    for (std::uint64_t i = 0; i < 300; ++i) samples.push_back(qv_relation_sample(simulate_truncated(cfg, derive_stream(5, i)), cfg, 1, -1));
    CHECK(qv_relation_check(samples, "(1,-1)").verdict == Verdict::pass);
}

TEST_CASE("qv relation check ignores rounding in components that vanish identically") {
    // Real parts agree in mean; imaginary parts are rounding noise around a
    // nonzero offset, as for (m, n) = (1, -1).
    std::vector<QvRelationSample> samples;
    for (int i = 0; i < 40; ++i) {
        const double noise = (i % 2 == 0 ? 0.1 : -0.1);
        samples.push_back({Complex{5.0 + noise, 1.5e-15 + 1e-17 * (i % 3)}, Complex{5.0, 0.0}});
    }
    const auto r = qv_relation_check(samples, "(1,-1)");
    CHECK(r.lines[1].verdict == Verdict::pass);
    CHECK(r.verdict == Verdict::pass);
    // A genuine imaginary discrepancy still fails.
    for (auto& s : samples) s.realized += Complex{0.0, 0.01};
    CHECK(qv_relation_check(samples, "(1,-1)").lines[1].verdict == Verdict::fail);
}
