#include "spdelab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>

#include "spdelab/errors.hpp"
#include "spdelab/functionals.hpp"
#include "spdelab/power.hpp"

namespace spdelab {

void SpdeConfig::validate() const {
    if (!(gamma > 1.0)) throw ConfigError("spde: gamma must exceed 1");
    if (!(trunc > 0.0)) throw ConfigError("spde: truncation level must be positive");
    if (grid.m < 4 || std::fabs(grid.h * grid.m - 1.0) > 1e-12) {
        throw ConfigError("spde: invalid grid");
    }
    if (!(dt > 0.0) || !(dt <= horizon)) throw ConfigError("spde: need 0 < dt <= horizon");
    if (scheme == SpdeScheme::explicit_euler && dt > 0.5 * grid.h * grid.h * (1.0 + 1e-12)) {
        throw ConfigError("spde: explicit scheme needs dt <= h^2/2 (dt=" + std::to_string(dt) +
                          ", h^2/2=" + std::to_string(0.5 * grid.h * grid.h) + ")");
    }
    require_matching(u0, grid);
    for (double v : u0) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("spde: initial field must be finite and nonnegative");
        }
    }
    if (sample_every == 0) throw ConfigError("spde: sample stride must be positive");
    for (double p : lp_orders) {
        if (!(p >= 1.0)) throw ConfigError("spde: L^p orders must be >= 1");
    }
    for (const auto& spec : norm_integrals) {
        if (!(spec.order >= 1.0) || !(spec.exponent > 0.0)) {
            throw ConfigError("spde: norm integral needs order >= 1 and exponent > 0");
        }
    }
    if (!(noise_scale >= 0.0)) throw ConfigError("spde: noise scale must be nonnegative");
    if (!(explode_threshold > 0.0)) throw ConfigError("spde: explode threshold must be positive");
}

std::size_t SpdeConfig::steps() const {
    return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

double SpdeConfig::step_size() const { return horizon / static_cast<double>(steps()); }

Field constant_field(const GridSpec& grid, double value) { return Field(grid.size(), value); }

Field capped_spike(const GridSpec& grid, double mass, int cell, double cap) {
    if (cell < 0 || cell >= grid.m) throw ConfigError("spike cell outside the grid");
    if (!(mass >= 0.0)) throw ConfigError("spike mass must be nonnegative");
    Field f(grid.size(), 0.0);
    f[static_cast<std::size_t>(cell)] = std::min(mass / grid.h, cap);
    return f;
}

Field truncated_initial(const SpdeConfig& cfg) {
    Field f = cfg.u0;
    for (double& v : f) v = std::min(v, cfg.trunc);
    return f;
}

LatticeStepper::LatticeStepper(const SpdeConfig& cfg)
    : cfg_(&cfg), integrand_(cfg.grid.size()), scratch_(cfg.grid.size()) {
    if (cfg.scheme == SpdeScheme::semi_implicit) solver_.emplace(cfg.grid, cfg.step_size());
}

double LatticeStepper::advance(std::span<double> u, std::span<const double> slab) {
    const SpdeConfig& cfg = *cfg_;
    const std::size_t m = cfg.grid.size();
    const double n = cfg.trunc;
    const double gamma = cfg.gamma;
    for (std::size_t x = 0; x < m; ++x) integrand_[x] = power(std::min(u[x], n), gamma);

    if (cfg.scheme == SpdeScheme::explicit_euler) {
        const double dt = cfg.step_size();
        apply_discrete_laplacian(u, cfg.grid, scratch_);
        for (std::size_t x = 0; x < m; ++x) u[x] += dt * scratch_[x] + integrand_[x] * slab[x];
    } else {
        for (std::size_t x = 0; x < m; ++x) u[x] += integrand_[x] * slab[x];
        solver_->solve(u);
    }

    double removed = 0.0;
    if (cfg.clamp) {
        for (std::size_t x = 0; x < m; ++x) {
            if (u[x] < 0.0) {
                removed -= u[x];
                u[x] = 0.0;
            }
        }
    }
    return cfg.grid.h * removed;
}

namespace {

Field step_with(const Field& u, const Slab& slab, SpdeConfig cfg, SpdeScheme scheme,
                double* clipped_mass) {
    cfg.scheme = scheme;
    if (cfg.u0.size() != cfg.grid.size()) cfg.u0 = Field(cfg.grid.size(), 0.0);
    cfg.validate();
    require_matching(u, cfg.grid);
    require_matching(slab, cfg.grid);
    LatticeStepper stepper(cfg);
    Field out = u;
    const double clipped = stepper.advance(out, slab);
    if (clipped_mass) *clipped_mass = clipped;
    return out;
}

// Records sampled functionals and every-step accumulators for one trajectory.
class TrajectoryBuilder {
public:
    explicit TrajectoryBuilder(const SpdeConfig& cfg) : cfg_(cfg) {
        traj_.step_dt = cfg.step_size();
        traj_.lp_orders = cfg.lp_orders;
        traj_.lp.resize(cfg.lp_orders.size());
        traj_.norm_integral_specs = cfg.norm_integrals;
        traj_.norm_integrals.assign(cfg.norm_integrals.size(), 0.0);
    }

    void begin(std::span<const double> u) {
        traj_.initial.assign(u.begin(), u.end());
        mass_ = total_mass(u, cfg_.grid);
        traj_.max_sup = sup_norm(u);
        sample(0.0, u);
    }

    // Left-endpoint accumulators, called with u_k before the step.
    void before_step(std::span<const double> u, std::span<const double> slab) {
        const double dt = traj_.step_dt;
        for (std::size_t i = 0; i < cfg_.norm_integrals.size(); ++i) {
            const auto& spec = cfg_.norm_integrals[i];
            traj_.norm_integrals[i] += dt * power(lp_norm(u, spec.order, cfg_.grid), spec.exponent);
        }
        if (cfg_.retain_steps) {
            traj_.step_fields.emplace_back(u.begin(), u.end());
            traj_.step_slabs.emplace_back(slab.begin(), slab.end());
        }
    }

    // Returns false when the path was flagged and must stop.
    bool after_step(std::size_t k, std::span<const double> u, std::span<const double> integrand,
                    double clipped) {
        const double dt = traj_.step_dt;
        double sq = 0.0;
        for (double g : integrand) sq += g * g;
        qv_ += dt * cfg_.grid.h * sq;
        clipped_ += clipped;

        double sup = 0.0;
        bool bad = false;
        for (double v : u) {
            if (!(v <= cfg_.explode_threshold) || !(v >= -cfg_.explode_threshold)) bad = true;
            sup = std::max(sup, v);
        }
        traj_.steps_run = k + 1;
        if (bad) {
            traj_.exploded = true;
            traj_.flagged_step = k;
            traj_.max_sup = std::numeric_limits<double>::infinity();
            for (double v : u) {
                if (std::isnan(v)) traj_.nan_abort = true;
            }
            traj_.final_field.assign(u.begin(), u.end());
            return false;
        }
        traj_.max_sup = std::max(traj_.max_sup, sup);
        const double mass = total_mass(u, cfg_.grid);
        realized_ += (mass - mass_) * (mass - mass_);
        mass_ = mass;
        if ((k + 1) % cfg_.sample_every == 0 || k + 1 == cfg_.steps()) {
            sample(static_cast<double>(k + 1) * dt, u);
        }
        return true;
    }

    Trajectory finish(std::span<const double> u) {
        if (!traj_.exploded) traj_.final_field.assign(u.begin(), u.end());
        return std::move(traj_);
    }

private:
    void sample(double t, std::span<const double> u) {
        traj_.times.push_back(t);
        traj_.mass.push_back(mass_);
        traj_.qv.push_back(qv_);
        traj_.realized_qv.push_back(realized_);
        traj_.sup.push_back(sup_norm(u));
        traj_.clipped.push_back(clipped_);
        for (std::size_t i = 0; i < cfg_.lp_orders.size(); ++i) {
            traj_.lp[i].push_back(lp_norm(u, cfg_.lp_orders[i], cfg_.grid));
        }
        if (cfg_.retain_fields) traj_.fields.emplace_back(u.begin(), u.end());
    }

    const SpdeConfig& cfg_;
    Trajectory traj_;
    double mass_ = 0.0;
    double qv_ = 0.0;
    double realized_ = 0.0;
    double clipped_ = 0.0;
};

}  // namespace

Field step_explicit(const Field& u, const Slab& slab, const SpdeConfig& cfg, double* clipped_mass) {
    return step_with(u, slab, cfg, SpdeScheme::explicit_euler, clipped_mass);
}

Field step_semi_implicit(const Field& u, const Slab& slab, const SpdeConfig& cfg,
                         double* clipped_mass) {
    return step_with(u, slab, cfg, SpdeScheme::semi_implicit, clipped_mass);
}

Trajectory simulate_with_slabs(const SpdeConfig& cfg, const SlabSource& source) {
    cfg.validate();
    const std::size_t steps = cfg.steps();
    Field u = truncated_initial(cfg);
    Field slab(cfg.grid.size());
    LatticeStepper stepper(cfg);
    TrajectoryBuilder builder(cfg);
    builder.begin(u);
    for (std::size_t k = 0; k < steps; ++k) {
        source(k, slab);
        if (cfg.noise_scale != 1.0) {
            for (double& v : slab) v *= cfg.noise_scale;
        }
        builder.before_step(u, slab);
        const double clipped = stepper.advance(u, slab);
        if (!builder.after_step(k, u, stepper.last_integrand(), clipped)) break;
    }
    return builder.finish(u);
}

Trajectory simulate_truncated(const SpdeConfig& cfg, const NoiseStream& stream) {
    const double dt = cfg.step_size();
    const GridSpec grid = cfg.grid;
    return simulate_with_slabs(cfg, [&](std::uint64_t step, std::span<double> out) {
        sample_slab(stream, step, grid, dt, out);
    });
}

CoupledPair simulate_coupled_pair(const SpdeConfig& cfg, double n1, double n2,
                                  const NoiseStream& stream,
                                  std::span<const double> distance_orders) {
    if (!(n1 <= n2)) throw ConfigError("coupled pair needs n1 <= n2");
    SpdeConfig cfg1 = cfg;
    SpdeConfig cfg2 = cfg;
    cfg1.trunc = n1;
    cfg2.trunc = n2;
    cfg1.validate();
    cfg2.validate();

    const std::size_t steps = cfg.steps();
    const double dt = cfg.step_size();
    Field u1 = truncated_initial(cfg1);
    Field u2 = truncated_initial(cfg2);
    Field slab(cfg.grid.size());
    LatticeStepper stepper1(cfg1);
    LatticeStepper stepper2(cfg2);
    TrajectoryBuilder builder1(cfg1);
    TrajectoryBuilder builder2(cfg2);
    builder1.begin(u1);
    builder2.begin(u2);

    CoupledPair pair;
    pair.distance_orders.assign(distance_orders.begin(), distance_orders.end());
    std::vector<PairDistance> distances;
    for (double p : distance_orders) distances.emplace_back(cfg.grid, p);

    bool coupled = true;
    for (std::size_t k = 0; k < steps; ++k) {
        if (coupled && (sup_norm(u1) >= n1 || sup_norm(u2) >= n1)) {
            coupled = false;
            pair.decoupling_time = static_cast<double>(k) * dt;
        }
        sample_slab(stream, k, cfg.grid, dt, slab);
        if (cfg.noise_scale != 1.0) {
            for (double& v : slab) v *= cfg.noise_scale;
        }
        for (auto& d : distances) d.add(u1, u2, dt);
        builder1.before_step(u1, slab);
        builder2.before_step(u2, slab);
        const double c1 = stepper1.advance(u1, slab);
        const double c2 = stepper2.advance(u2, slab);
        const bool ok1 = builder1.after_step(k, u1, stepper1.last_integrand(), c1);
        const bool ok2 = builder2.after_step(k, u2, stepper2.last_integrand(), c2);
        if (coupled && u1 != u2) pair.coupling_violated = true;
        if (!ok1 || !ok2) break;
    }
    pair.first = builder1.finish(u1);
    pair.second = builder2.finish(u2);
    for (const auto& d : distances) pair.distance_integrals.push_back(d.integral());
    return pair;
}

namespace {

// Circulant weights w(j) = h p_tau(j h), normalized to unit sum.
std::vector<double> continuum_weights(double tau, const GridSpec& grid) {
    std::vector<double> w(grid.size());
    double sum = 0.0;
    for (int j = 0; j < grid.m; ++j) {
        w[static_cast<std::size_t>(j)] = grid.h * heat_kernel(tau, j * grid.h);
        sum += w[static_cast<std::size_t>(j)];
    }
    for (double& v : w) v /= sum;
    return w;
}

void add_continuum(std::span<const double> f, double tau, const GridSpec& grid,
                   std::span<double> acc) {
    if (tau <= 0.0) {
        for (std::size_t x = 0; x < f.size(); ++x) acc[x] += f[x];
        return;
    }
    const auto w = continuum_weights(tau, grid);
    const std::size_t m = grid.size();
    for (std::size_t x = 0; x < m; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < m; ++y) s += w[(x + m - y) % m] * f[y];
        acc[x] += s;
    }
}

}  // namespace

double mild_residual(const Trajectory& traj, const SpdeConfig& cfg, double t, MildKernel kernel) {
    if (traj.step_fields.size() != traj.steps_run || traj.step_slabs.size() != traj.steps_run) {
        throw UnavailableError("mild residual needs a trajectory run with retain_steps");
    }
    const double dt = traj.step_dt;
    const double steps_f = t / dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_f));
    if (!(t >= 0.0) || std::fabs(steps_f - static_cast<double>(steps)) > 1e-6 ||
        steps > traj.steps_run) {
        throw DomainError("mild residual: t must be an executed step time");
    }
    const GridSpec& grid = cfg.grid;
    const std::size_t m = grid.size();
    const Field& u_t = steps < traj.steps_run ? traj.step_fields[steps] : traj.final_field;

    std::vector<double> integrand(m);
    auto fill_integrand = [&](std::size_t k) {
        for (std::size_t x = 0; x < m; ++x) {
            integrand[x] = power(std::min(traj.step_fields[k][x], cfg.trunc), cfg.gamma) *
                           traj.step_slabs[k][x];
        }
    };

    Field predicted(m, 0.0);
    if (kernel == MildKernel::lattice) {
        const CircleDft dft(grid);
        std::vector<double> eig(m);
        for (std::size_t n = 0; n < m; ++n) eig[n] = laplacian_eigenvalue(static_cast<int>(n), grid);
        auto acc = dft.forward(traj.initial);
        for (std::size_t n = 0; n < m; ++n) acc[n] *= std::exp(t * eig[n]);
        for (std::size_t k = 0; k < steps; ++k) {
            fill_integrand(k);
            const auto coeffs = dft.forward(integrand);
            const double tau = t - static_cast<double>(k) * dt;
            for (std::size_t n = 0; n < m; ++n) acc[n] += std::exp(tau * eig[n]) * coeffs[n];
        }
        dft.inverse(acc, predicted);
    } else {
        add_continuum(traj.initial, t, grid, predicted);
        for (std::size_t k = 0; k < steps; ++k) {
            fill_integrand(k);
            add_continuum(integrand, t - static_cast<double>(k) * dt, grid, predicted);
        }
    }

    double sum = 0.0;
    for (std::size_t x = 0; x < m; ++x) sum += (u_t[x] - predicted[x]) * (u_t[x] - predicted[x]);
    return std::sqrt(grid.h * sum);
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    out << "t,U";
    for (double p : traj.lp_orders) out << ",L" << p;
    out << ",QV,sup,clipped\n";
    out.precision(17);
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        out << traj.times[j] << ',' << traj.mass[j];
        for (const auto& series : traj.lp) out << ',' << series[j];
        out << ',' << traj.qv[j] << ',' << traj.sup[j] << ',' << traj.clipped[j] << '\n';
    }
}

}  // namespace spdelab
