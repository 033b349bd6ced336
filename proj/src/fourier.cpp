#include "spdelab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spdelab/errors.hpp"
#include "spdelab/power.hpp"

namespace spdelab {

namespace {

void require_mode(int n, const GridSpec& spec) {
    if (std::abs(n) > max_mode(spec)) {
        throw ConfigError("mode " + std::to_string(n) + " exceeds the resolvable range +-" +
                          std::to_string(max_mode(spec)));
    }
}

Coefficients coefficients_with(const CircleDft& dft, std::span<const double> u, int n_max) {
    const GridSpec& spec = dft.grid();
    Coefficients c;
    c.n_max = n_max;
    c.values.assign(static_cast<std::size_t>(2 * n_max + 1), Complex{});
    for (int n = 0; n <= n_max; ++n) {
        Complex acc{};
        for (int x = 0; x < spec.m; ++x) acc += u[static_cast<std::size_t>(x)] * dft.twiddle(1LL * n * x);
        acc *= spec.h;
        c[n] = acc;
        c[-n] = std::conj(acc);
    }
    return c;
}

Field reconstruct_with(const CircleDft& dft, const Coefficients& lambda) {
    const GridSpec& spec = dft.grid();
    Field f(spec.size());
    for (int x = 0; x < spec.m; ++x) {
        Complex acc{};
        for (int n = -lambda.n_max; n <= lambda.n_max; ++n) {
            acc += lambda[n] * std::conj(dft.twiddle(1LL * n * x));
        }
        f[static_cast<std::size_t>(x)] = acc.real();
    }
    return f;
}

void clamp_reconstruction(Field& f, double cap) {
    double scale = 0.0;
    for (double v : f) scale = std::max(scale, std::fabs(v));
    const double tol = 1e-9 * scale;
    for (double& v : f) {
        if (v < -tol) throw DomainError("reconstructed field is negative beyond tolerance");
        v = std::min(std::max(v, 0.0), cap);
    }
}

Complex f_functional_with(const CircleDft& dft, const Coefficients& lambda,
                          const Coefficients& mu, int mode, double gamma, double cap) {
    const GridSpec& spec = dft.grid();
    Field a = reconstruct_with(dft, lambda);
    clamp_reconstruction(a, cap);
    Field b;
    if (&lambda == &mu) {
        b = a;
    } else {
        b = reconstruct_with(dft, mu);
        clamp_reconstruction(b, cap);
    }
    Complex acc{};
    for (int x = 0; x < spec.m; ++x) {
        const auto i = static_cast<std::size_t>(x);
        acc += power(a[i], gamma) * power(b[i], gamma) * dft.twiddle(1LL * mode * x);
    }
    return acc * spec.h;
}

}  // namespace

int max_mode(const GridSpec& spec) { return (spec.m - 1) / 2; }

Coefficients coefficients(std::span<const double> u, int n_max, const GridSpec& spec) {
    require_matching(u, spec);
    if (n_max < 0 || 2 * n_max >= spec.m) {
        throw ConfigError("n_max must satisfy 0 <= n_max < m/2 (aliasing)");
    }
    return coefficients_with(CircleDft(spec), u, n_max);
}

Field reconstruct(const Coefficients& lambda, const GridSpec& spec) {
    return reconstruct_with(CircleDft(spec), lambda);
}

CoeffSeries coefficient_series(const Trajectory& traj, int n, const GridSpec& spec) {
    require_mode(n, spec);
    if (traj.fields.size() != traj.times.size()) {
        throw UnavailableError("coefficient series needs a trajectory run with retain_fields");
    }
    const CircleDft dft(spec);
    CoeffSeries series;
    series.n = n;
    series.times = traj.times;
    series.values.reserve(traj.fields.size());
    for (const auto& f : traj.fields) {
        Complex acc{};
        for (int x = 0; x < spec.m; ++x) acc += f[static_cast<std::size_t>(x)] * dft.twiddle(1LL * n * x);
        series.values.push_back(acc * spec.h);
    }
    return series;
}

double drift_rate(int n, EigenConvention convention) {
    const double nn = static_cast<double>(n) * n;
    if (convention == EigenConvention::paper_literal) return 0.5 * nn;
    return 2.0 * std::numbers::pi * std::numbers::pi * nn;
}

CoeffSeries coefficient_drift_residual(const Trajectory& traj, int n, EigenConvention convention,
                                       const GridSpec& spec) {
    CoeffSeries lambda = coefficient_series(traj, n, spec);
    const double kappa = drift_rate(n, convention);
    CoeffSeries residual;
    residual.n = n;
    residual.times = lambda.times;
    residual.values.reserve(lambda.values.size());
    Complex integral{};
    for (std::size_t j = 0; j < lambda.values.size(); ++j) {
        if (j > 0) integral += (lambda.times[j] - lambda.times[j - 1]) * lambda.values[j - 1];
        residual.values.push_back(lambda.values[j] - lambda.values.front() + kappa * integral);
    }
    return residual;
}

Complex f_functional(const Coefficients& lambda, const Coefficients& mu, int mode, double gamma,
                     const GridSpec& spec, double cap) {
    if (lambda.n_max != mu.n_max) throw ConfigError("F_m: coefficient sequences differ in length");
    for (const Coefficients* c : {&lambda, &mu}) {
        for (int n = 1; n <= c->n_max; ++n) {
            const Complex d = (*c)[n] - std::conj((*c)[-n]);
            if (std::abs(d) > 1e-12 * (1.0 + std::abs((*c)[n]))) {
                throw DomainError("F_m: coefficients are not conjugate symmetric");
            }
        }
    }
    return f_functional_with(CircleDft(spec), lambda, mu, mode, gamma, cap);
}

QvRelationSample qv_relation_sample(const Trajectory& traj, const SpdeConfig& cfg, int mode_m,
                                    int mode_n) {
    if (traj.step_fields.size() != traj.steps_run || traj.step_slabs.size() != traj.steps_run) {
        throw UnavailableError("QV relation needs a trajectory run with retain_steps");
    }
    const GridSpec& spec = cfg.grid;
    require_mode(mode_m, spec);
    require_mode(mode_n, spec);
    const CircleDft dft(spec);
    const int n_max = max_mode(spec);
    const double dt = traj.step_dt;
    const bool exact_inverse = spec.m % 2 == 1;

    QvRelationSample out{};
    for (std::size_t k = 0; k < traj.steps_run; ++k) {
        const Field& u = traj.step_fields[k];
        const Slab& xi = traj.step_slabs[k];
        Complex dm{}, dn{};
        for (int x = 0; x < spec.m; ++x) {
            const auto i = static_cast<std::size_t>(x);
            const double term = power(std::min(u[i], cfg.trunc), cfg.gamma) * xi[i];
            dm += term * dft.twiddle(1LL * mode_m * x);
            dn += term * dft.twiddle(1LL * mode_n * x);
        }
        out.realized += (spec.h * dm) * (spec.h * dn);
        if (exact_inverse) {
            // Odd m: f(lambda(u)) is u itself, so F is evaluated on the field directly.
            Complex acc{};
            for (int x = 0; x < spec.m; ++x) {
                const double v = std::min(u[static_cast<std::size_t>(x)], cfg.trunc);
                acc += power(v, 2.0 * cfg.gamma) * dft.twiddle(1LL * (mode_m + mode_n) * x);
            }
            out.predicted += dt * spec.h * acc;
        } else {
            const Coefficients lambda = coefficients_with(dft, u, n_max);
            out.predicted += dt * f_functional_with(dft, lambda, lambda, mode_m + mode_n,
                                                    cfg.gamma, cfg.trunc);
        }
    }
    return out;
}

namespace {
constexpr double kRoundingFloor = 1e-12;
}  // namespace

CheckReport qv_relation_check(std::span<const QvRelationSample> samples, const std::string& label) {
    if (samples.empty()) throw ConfigError("QV relation: empty sample set");
    CheckReport report;
    report.name = "qv_relation";
    report.sample_size = samples.size();
    const bool degenerate = std::all_of(samples.begin(), samples.end(), [](const auto& s) {
        return s.realized == Complex{};
    });
    if (degenerate) {
        report.verdict = Verdict::inconclusive;
        report.note = "no martingale part (zero noise); comparison skipped";
        return report;
    }
    std::vector<double> re(samples.size()), im(samples.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Complex d = samples[i].realized - samples[i].predicted;
        re[i] = d.real();
        im[i] = d.imag();
        scale += std::abs(samples[i].predicted);
    }
    // Rounding floor: for m = -n the imaginary part vanishes identically.
    const double floor = kRoundingFloor * scale / static_cast<double>(samples.size());
    report.lines.push_back(zero_mean_line("Re discrepancy " + label, re, floor));
    report.lines.push_back(zero_mean_line("Im discrepancy " + label, im, floor));
    report.verdict = combine(report.lines);
    return report;
}

CheckReport qv_relation_check(const Trajectory& traj, const SpdeConfig& cfg, int mode_m,
                              int mode_n) {
    const QvRelationSample sample = qv_relation_sample(traj, cfg, mode_m, mode_n);
    return qv_relation_check(std::span<const QvRelationSample>(&sample, 1),
                             "(" + std::to_string(mode_m) + "," + std::to_string(mode_n) + ")");
}

}  // namespace spdelab
