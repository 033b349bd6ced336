#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "spdelab/lattice.hpp"
#include "spdelab/noise.hpp"

namespace spdelab {

// Lattice dynamics for the truncated equation
//   du(x) = A u(x) dt + (u(x) ^ n)^gamma dW^(x),   Var W^(x)(t) = t / h,
// where A is the discrete Laplacian and n the truncation level.

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

enum class SpdeScheme { explicit_euler, semi_implicit };

/// Exponent and order of a time-integrated norm functional:
/// sum_k dt * ||u_k||_order^exponent.
struct NormIntegralSpec {
    double order = 2.0;
    double exponent = 1.0;
};

struct SpdeConfig {
    double gamma = 2.0;
    double trunc = kNoTruncation;  ///< truncation level n; kNoTruncation runs untruncated
    GridSpec grid = GridSpec::make(64);
    double dt = 1e-4;
    double horizon = 0.25;
    SpdeScheme scheme = SpdeScheme::semi_implicit;
    Field u0;                          ///< nonnegative; capped at trunc before the run
    std::size_t sample_every = 1;      ///< sampling stride in steps
    std::vector<double> lp_orders;     ///< p values for the sampled L^p series
    std::vector<NormIntegralSpec> norm_integrals;
    bool retain_fields = false;        ///< keep the sampled fields
    bool retain_steps = false;         ///< keep every step's field and slab (diagnostics)
    double noise_scale = 1.0;          ///< test hook; 0 gives deterministic heat flow
    bool clamp = true;                 ///< test hook; false skips clamping negatives
    double explode_threshold = 1e100;

    /// Throws ConfigError on any violated precondition, including dt > h^2/2
    /// for the explicit scheme.
    void validate() const;
    std::size_t steps() const;
    double step_size() const;
};

Field constant_field(const GridSpec& grid, double value);
/// Mass concentrated on one cell, capped at `cap` as the initial condition is.
Field capped_spike(const GridSpec& grid, double mass, int cell, double cap);
/// u0 ^ trunc, the initial condition of the truncated problem.
Field truncated_initial(const SpdeConfig& cfg);

/// One time step of the lattice dynamics with buffers sized once.
class LatticeStepper {
public:
    explicit LatticeStepper(const SpdeConfig& cfg);

    /// Advances u in place with the increments in slab (already N(0, dt/h)).
    /// Returns the mass added by clamping, h * sum of removed negative parts.
    double advance(std::span<double> u, std::span<const double> slab);

    /// (u ^ n)^gamma evaluated at the start of the last advance().
    std::span<const double> last_integrand() const { return integrand_; }

private:
    const SpdeConfig* cfg_;
    std::optional<CyclicHeatSolver> solver_;
    std::vector<double> integrand_;
    std::vector<double> scratch_;
};

Field step_explicit(const Field& u, const Slab& slab, const SpdeConfig& cfg,
                    double* clipped_mass = nullptr);
Field step_semi_implicit(const Field& u, const Slab& slab, const SpdeConfig& cfg,
                         double* clipped_mass = nullptr);

struct Trajectory {
    std::vector<double> times;        ///< sampled times
    std::vector<Field> fields;        ///< sampled fields when retain_fields
    std::vector<double> mass;         ///< U(t) = h sum u
    std::vector<double> qv;           ///< accumulated sum dt h sum (u ^ n)^(2 gamma)
    std::vector<double> realized_qv;  ///< sum of squared mass increments
    std::vector<double> sup;          ///< max_x u
    std::vector<double> clipped;      ///< cumulative clipped mass
    std::vector<double> lp_orders;
    std::vector<std::vector<double>> lp;  ///< lp[i][j]: ||u||_{lp_orders[i]} at times[j]
    std::vector<NormIntegralSpec> norm_integral_specs;
    std::vector<double> norm_integrals;   ///< per spec, accumulated to the end of the run

    std::vector<Field> step_fields;  ///< u_k for every executed step when retain_steps
    std::vector<Slab> step_slabs;    ///< scaled slab of every executed step when retain_steps
    Field initial;
    Field final_field;

    double step_dt = 0.0;
    std::size_t steps_run = 0;
    double max_sup = 0.0;  ///< max over every step, not only the sampled ones
    bool exploded = false;
    bool nan_abort = false;
    std::optional<std::size_t> flagged_step;
};

/// Source of the (unscaled by noise_scale) increments for a step.
using SlabSource = std::function<void(std::uint64_t step, std::span<double> out)>;

Trajectory simulate_truncated(const SpdeConfig& cfg, const NoiseStream& stream);
Trajectory simulate_with_slabs(const SpdeConfig& cfg, const SlabSource& source);

struct CoupledPair {
    Trajectory first;   ///< truncation level n1
    Trajectory second;  ///< truncation level n2
    /// First step time at which either field reached n1 (coupling may end).
    std::optional<double> decoupling_time;
    /// Set when the fields differed before decoupling_time.
    bool coupling_violated = false;
    std::vector<double> distance_orders;
    /// Left-endpoint sum over steps of dt h sum_x |u1 - u2|^p, per order.
    std::vector<double> distance_integrals;
};

/// Runs truncation levels n1 <= n2 on the identical slabs. Throws ConfigError
/// for n1 > n2.
CoupledPair simulate_coupled_pair(const SpdeConfig& cfg, double n1, double n2,
                                  const NoiseStream& stream,
                                  std::span<const double> distance_orders = {});

enum class MildKernel {
    lattice,    ///< exact semigroup of the discrete Laplacian
    continuum,  ///< grid quadrature of the continuum heat kernel
};

/// Discrete L^2 norm of u(t) - P_t u0 - sum_k P_{t - t_k}[(u_k ^ n)^gamma xi_k]
/// at a step time t. Needs a trajectory run with retain_steps, else throws
/// UnavailableError.
double mild_residual(const Trajectory& traj, const SpdeConfig& cfg, double t,
                     MildKernel kernel = MildKernel::lattice);

/// CSV with one row per sampled time: t, U, L^p norms, QV, sup, clipped mass.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace spdelab
