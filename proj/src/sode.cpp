#include "spdelab/sode.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spdelab/errors.hpp"
#include "spdelab/power.hpp"
#include "spdelab/samplers.hpp"

namespace spdelab {

void SodeConfig::validate() const {
    if (!(gamma > 1.0)) throw ConfigError("sode: gamma must exceed 1");
    if (!(u0 > 0.0)) throw ConfigError("sode: u0 must be positive");
    if (!(dt > 0.0) || !(dt <= horizon)) throw ConfigError("sode: need 0 < dt <= horizon");
    if (!(noise_scale >= 0.0)) throw ConfigError("sode: noise scale must be nonnegative");
    if (!(max_relative_noise >= 0.0)) throw ConfigError("sode: max_relative_noise must be nonnegative");
    if (steps() >= (std::size_t{1} << 36)) throw ConfigError("sode: too many steps");
}

std::size_t SodeConfig::steps() const {
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

double SodeConfig::step_size() const { return horizon / static_cast<double>(steps()); }

double bessel_dimension(double gamma) {
    if (!(gamma > 1.0)) throw DomainError("Bessel dimension needs gamma > 1");
    return (2.0 * gamma - 1.0) / (gamma - 1.0);
}

namespace {

constexpr int kMaxBridgeDepth = 50;

struct EulerState {
    double u = 0.0;
    double qv = 0.0;
    double running_max = 0.0;
    bool exploded = false;
    bool absorbed = false;
};

// Euler step of length h driven by the Brownian increment w, split in two
// along the bridge while the relative noise is above the configured limit.
void euler_step(EulerState& s, const SodeConfig& cfg, const NoiseStream& stream, std::uint64_t step, double h,
                double w, std::uint64_t node, int depth) {
    const double g = power(s.u, cfg.gamma);
    if (cfg.max_relative_noise > 0.0 && depth < kMaxBridgeDepth &&
        cfg.noise_scale * g / s.u * std::sqrt(h) > cfg.max_relative_noise) {
        const std::uint64_t major = ((node >> 32) << 36) | step;
        const auto words = stream.block(NoiseDomain::bridge, major, static_cast<std::uint32_t>(node));
        const double w1 = 0.5 * w + 0.5 * std::sqrt(h) * normal_quantile(to_open_unit(words[0]));
        euler_step(s, cfg, stream, step, 0.5 * h, w1, 2 * node, depth + 1);
        if (s.exploded || s.absorbed) return;
        euler_step(s, cfg, stream, step, 0.5 * h, w - w1, 2 * node + 1, depth + 1);
        return;
    }
    s.qv += power(s.u, 2.0 * cfg.gamma) * h;
    s.u += g * cfg.noise_scale * w;
    if (!(s.u <= cfg.explode_threshold)) {  // catches NaN and inf
        s.exploded = true;
        s.running_max = std::numeric_limits<double>::infinity();
        return;
    }
    if (s.u <= 0.0) {
        s.u = 0.0;
        s.absorbed = true;
    }
    s.running_max = std::max(s.running_max, s.u);
}

}  // namespace

SodePath simulate_euler(const SodeConfig& cfg, const NoiseStream& stream) {
    cfg.validate();
    const std::size_t steps = cfg.steps();
    const double dt = cfg.step_size();
    const double sqrt_dt = std::sqrt(dt);

    SodePath path;
    const std::size_t stride = cfg.record_every == 0 ? steps : cfg.record_every;
    path.times.reserve(steps / stride + 2);
    path.values.reserve(steps / stride + 2);
    path.times.push_back(0.0);
    path.values.push_back(cfg.u0);

    EulerState s;
    s.u = cfg.u0;
    s.running_max = cfg.u0;
    std::array<std::uint64_t, 2> words{};
    std::size_t k = 0;
    for (; k < steps; ++k) {
        if ((k & 1u) == 0) words = stream.block(NoiseDomain::scalar, k >> 1, 0);
        const double z = normal_quantile(to_open_unit(words[k & 1u]));
        euler_step(s, cfg, stream, k, dt, sqrt_dt * z, 1, 0);
        if (s.exploded) {
            path.exploded = true;
            path.explode_step = k;
            break;
        }
        if ((k + 1) % stride == 0 || k + 1 == steps) {
            path.times.push_back(static_cast<double>(k + 1) * dt);
            path.values.push_back(s.u);
        }
        if (s.absorbed) break;
    }
    path.absorbed = s.absorbed;
    if (path.absorbed) {
        // Zero is absorbing: the remainder of the recorded path is identically zero.
        for (std::size_t j = k + 1; j < steps; ++j) {
            if ((j + 1) % stride == 0 || j + 1 == steps) {
                path.times.push_back(static_cast<double>(j + 1) * dt);
                path.values.push_back(0.0);
            }
        }
    }
    path.running_max = s.running_max;
    path.terminal = s.u;
    path.quadratic_variation = s.qv;
    return path;
}

double u_from_squared_bessel(double squared_bessel, double gamma) {
    return std::pow(squared_bessel, -1.0 / (2.0 * (gamma - 1.0)));
}

double simulate_exact_bessel(const SodeConfig& cfg, const NoiseStream& stream, double t) {
    cfg.validate();
    if (!(t >= 0.0)) throw DomainError("exact sampler needs t >= 0");
    if (t == 0.0) return cfg.u0;
    const double dim = bessel_dimension(cfg.gamma);
    const double x0 = std::pow(cfg.u0, 2.0 * (1.0 - cfg.gamma));
    const double s = (cfg.gamma - 1.0) * (cfg.gamma - 1.0) * t;
    AuxDraws draws(stream, 0);
    return u_from_squared_bessel(sample_squared_bessel(dim, x0, s, draws), cfg.gamma);
}

double asymptotic_pdf(double gamma, double y, DensityVariant variant) {
    const double dim = bessel_dimension(gamma);
    if (y < 0.0) return 0.0;
    const double half = 0.5 * dim;  // (2 gamma - 1) / (2 gamma - 2)
    const double norm = 1.0 / (std::pow(2.0, half) * std::tgamma(half));
    if (variant == DensityVariant::paper_literal) {
        return norm * std::pow(y, -1.0 / (2.0 * gamma - 2.0)) * std::exp(-0.5 * y);
    }
    if (y == 0.0) return 0.0;
    return norm * std::pow(y, half - 1.0) * std::exp(-0.5 * y);
}

double literal_density_mass(double gamma) {
    const double b = 1.0 / (2.0 * gamma - 2.0);
    if (!(b < 1.0)) return std::numeric_limits<double>::infinity();
    // integral of y^-b e^-y/2 is 2^(1-b) Gamma(1-b); the printed constant is
    // 1 / (2^(1+b) Gamma(1+b)).
    return std::pow(2.0, -2.0 * b) * std::tgamma(1.0 - b) / std::tgamma(1.0 + b);
}

double asymptotic_cdf(double gamma, double y, DensityVariant variant) {
    const double dim = bessel_dimension(gamma);
    if (y <= 0.0) return 0.0;
    if (variant == DensityVariant::chi_square) {
        return boost::math::gamma_p(0.5 * dim, 0.5 * y);
    }
    const double b = 1.0 / (2.0 * gamma - 2.0);
    if (!(b < 1.0)) throw DomainError("printed density is not normalizable for gamma <= 3/2");
    return boost::math::gamma_p(1.0 - b, 0.5 * y);
}

double rescaled_statistic(double u_T, double gamma, double T) {
    if (!(u_T > 0.0)) throw DomainError("rescaled statistic needs u_T > 0 (path absorbed?)");
    if (!(T > 0.0)) throw DomainError("rescaled statistic needs T > 0");
    if (!(gamma > 1.0)) throw DomainError("rescaled statistic needs gamma > 1");
    return std::pow(u_T, 2.0 * (1.0 - gamma)) / ((gamma - 1.0) * (gamma - 1.0) * T);
}

}  // namespace spdelab
