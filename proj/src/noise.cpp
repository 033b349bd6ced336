#include "spdelab/noise.hpp"

#include <cmath>
#include <limits>

#include "spdelab/errors.hpp"

namespace spdelab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline double poly(const double* coef, int n, double r) {
    double acc = coef[n - 1];
    for (int i = n - 2; i >= 0; --i) acc = acc * r + coef[i];
    return acc;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        counter = philox_round(counter, key);
    }
    return counter;
}

double normal_quantile(double p) {
    static constexpr double a[8] = {3.3871328727963666080e0,  1.3314166789178437745e+2,
                                    1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                    4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                    3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr double b[8] = {1.0,
                                    4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                    5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                    3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                    5.2264952788528545610e+3};
    static constexpr double c[8] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                    5.76949722146069140550e0,  3.64784832476320460504e0,
                                    1.27045825245236838258e0,  2.41780725177450611770e-1,
                                    2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[8] = {1.0,
                                    2.05319162663775882187e0,  1.67638483018380384940e0,
                                    6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                    1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                    1.05075007164441684324e-9};
    static constexpr double e[8] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                    1.78482653991729133580e0,  2.96560571828504891230e-1,
                                    2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                    2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[8] = {1.0,
                                    5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                    1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                    1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                    2.04426310338993978564e-15};

    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw DomainError("normal quantile needs p in [0, 1]");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(a, 8, r) / poly(b, 8, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        z = poly(c, 8, r) / poly(d, 8, r);
    } else {
        r -= 5.0;
        z = poly(e, 8, r) / poly(f, 8, r);
    }
    return q < 0.0 ? -z : z;
}

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t path_index)
    : seed_(master_seed),
      path_(path_index),
      key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)} {
    if (path_index > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("path index exceeds 2^32 - 1");
    }
}

std::array<std::uint64_t, 2> NoiseStream::block(NoiseDomain domain, std::uint64_t major,
                                                std::uint32_t minor) const {
    const PhiloxCounter counter{
        minor, static_cast<std::uint32_t>(major), static_cast<std::uint32_t>(path_),
        (static_cast<std::uint32_t>(domain) << 24) |
            (static_cast<std::uint32_t>(major >> 32) & 0x00FFFFFFu)};
    const PhiloxCounter out = philox4x32_10(counter, key_);
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
            (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double NoiseStream::lattice_normal(std::uint64_t step, std::uint32_t cell) const {
    const auto words = block(NoiseDomain::lattice, step, cell >> 1);
    return normal_quantile(to_open_unit(words[cell & 1u]));
}

double NoiseStream::scalar_normal(std::uint64_t step) const {
    const auto words = block(NoiseDomain::scalar, step >> 1, 0);
    return normal_quantile(to_open_unit(words[step & 1u]));
}

NoiseStream derive_stream(std::uint64_t master_seed, std::uint64_t path_index) {
    return NoiseStream(master_seed, path_index);
}

AuxDraws::AuxDraws(const NoiseStream& stream, std::uint64_t major)
    : stream_(&stream), major_(major) {}

double AuxDraws::uniform() {
    if (buffered_ == 0) {
        buffer_ = stream_->block(NoiseDomain::aux, major_, next_block_++);
        buffered_ = 2;
    }
    return to_open_unit(buffer_[static_cast<std::size_t>(2 - buffered_--)]);
}

void sample_slab(const NoiseStream& stream, std::uint64_t step, const GridSpec& spec, double dt,
                 std::span<double> out) {
    if (!(dt > 0.0)) throw DomainError("slab needs dt > 0");
    require_matching(out, spec);
    const double scale = std::sqrt(dt / spec.h);
    const std::uint32_t m = static_cast<std::uint32_t>(spec.m);
    for (std::uint32_t pair = 0; 2 * pair < m; ++pair) {
        const auto words = stream.block(NoiseDomain::lattice, step, pair);
        out[2 * pair] = scale * normal_quantile(to_open_unit(words[0]));
        if (2 * pair + 1 < m) out[2 * pair + 1] = scale * normal_quantile(to_open_unit(words[1]));
    }
}

Slab sample_slab(const NoiseStream& stream, std::uint64_t step, const GridSpec& spec, double dt) {
    Slab out(spec.size());
    sample_slab(stream, step, spec, dt, out);
    return out;
}

}  // namespace spdelab
