#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "spdelab/lattice.hpp"

namespace spdelab {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
/// Period is 2^128 per key and any block is addressable without generating
/// its predecessors.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// Maps a 64-bit word to a uniform in the open interval (0, 1) using its top 52 bits.
/// With 53 bits the largest value 1 - 2^-54 would round to 1.
inline double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal quantile, Wichura's AS241 (PPND16); relative accuracy ~1e-16.
double normal_quantile(double p);

/// Independent sub-streams sharing one key. The tag occupies the top byte of
/// the fourth counter word, so the 56-bit major index never collides across tags.
enum class NoiseDomain : std::uint32_t {
    lattice = 0,  ///< space-time increments for the SPDE
    scalar = 1,   ///< Brownian increments for the SODE
    aux = 2,      ///< variable-length draws (Bessel transitions, rejection samplers)
    bridge = 3,   ///< Brownian-bridge midpoints for refined SODE steps
};

/// Deterministic source of Gaussian draws for one ensemble path. Every draw is
/// a pure function of (master_seed, path_index, domain, major, minor), so no
/// sequential state is shared between paths or time steps.
class NoiseStream {
public:
    NoiseStream(std::uint64_t master_seed, std::uint64_t path_index);

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t path_index() const { return path_; }

    /// Two 64-bit words from the block addressed by (domain, major, minor).
    std::array<std::uint64_t, 2> block(NoiseDomain domain, std::uint64_t major,
                                       std::uint32_t minor) const;

    /// Standard normal for the SPDE lattice at (step, cell).
    double lattice_normal(std::uint64_t step, std::uint32_t cell) const;

    /// Standard normal for the SODE Brownian increment of a step.
    double scalar_normal(std::uint64_t step) const;

private:
    std::uint64_t seed_;
    std::uint64_t path_;
    PhiloxKey key_;
};

NoiseStream derive_stream(std::uint64_t master_seed, std::uint64_t path_index);

/// Sequential uniform/normal draws from the aux domain for one major index.
/// Used by samplers that consume a data-dependent number of variates.
class AuxDraws {
public:
    AuxDraws(const NoiseStream& stream, std::uint64_t major);

    double uniform();
    double normal() { return normal_quantile(uniform()); }

private:
    const NoiseStream* stream_;
    std::uint64_t major_;
    std::uint32_t next_block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

/// Increments xi_{k,x} of one time step: m entries, each N(0, dt/h).
using Slab = std::vector<double>;

/// Throws DomainError for dt <= 0.
Slab sample_slab(const NoiseStream& stream, std::uint64_t step, const GridSpec& spec, double dt);
void sample_slab(const NoiseStream& stream, std::uint64_t step, const GridSpec& spec, double dt,
                 std::span<double> out);

}  // namespace spdelab
