#pragma once

// Counter-based random numbers (Philox 4x32-10). Streams are keyed by
// (seed, path, role), so any parallel schedule over paths reproduces the
// sequential results bit for bit.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace logid {

namespace detail {
inline std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t stream,
                                                 std::uint64_t counter) {
    std::uint32_t c0 = static_cast<std::uint32_t>(counter);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0;
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2;
        const std::uint32_t h0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t l0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t h1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t l1 = static_cast<std::uint32_t>(p1);
        c0 = h1 ^ c1 ^ k0;
        c1 = l1;
        c2 = h0 ^ c3 ^ k1;
        c3 = l0;
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    return {c0, c1, c2, c3};
}
} // namespace detail

/// Sequential view of one (seed, path, role) stream.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t path, std::uint32_t role)
        : seed_(seed), stream_((path << 8) | role) {}

    std::uint64_t next_u64() {
        if (cached_) {
            cached_ = false;
            return cache_;
        }
        const auto b = detail::philox_block(seed_, stream_, counter_++);
        cache_ = (std::uint64_t{b[2]} << 32) | b[3];
        cached_ = true;
        return (std::uint64_t{b[0]} << 32) | b[1];
    }

    /// Uniform on (0, 1), never exactly 0 or 1.
    double uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1p-53;
        return u > 0.0 ? u : 0x1p-54;
    }

    /// Standard normal (Box-Muller, pairs cached).
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_normal_ = rad * std::sin(ang);
        have_normal_ = true;
        return rad * std::cos(ang);
    }

    /// Exact Poisson variate; large means split recursively so the
    /// exponential-product method never underflows.
    long poisson(double mean) {
        if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean > 500.0) return poisson(0.5 * mean) + poisson(mean - 0.5 * mean);
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
        if (shape < 1.0) {
            const double boost = std::pow(uniform(), 1.0 / shape);
            return gamma(shape + 1.0) * boost;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::uint64_t cache_ = 0;
    bool cached_ = false;
    bool have_normal_ = false;
    double spare_normal_ = 0.0;
};

} // namespace logid
