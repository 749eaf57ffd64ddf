#pragma once

#include <array>
#include <cstdint>

#include "smts/special.hpp"

// Counter-based random numbers for the simulation harness.
//
// The generator is Philox4x64 with 10 rounds, bit-compatible with NumPy's
// np.random.Philox (verified against known-answer vectors in the tests).
// Streams are identified by a 128-bit key derived from (seed, cell,
// replication, purpose), so replications can run in any order or in
// parallel and still consume identical random sequences.

namespace smts {

namespace detail {

inline constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

inline std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                               std::array<std::uint64_t, 2> key) {
    using namespace detail;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

class CounterRng {
public:
    CounterRng() : CounterRng(0, 0) {}

    CounterRng(std::uint64_t key0, std::uint64_t key1)
        : key_{key0, key1}, ctr_{0, 0, 0, 0}, idx_(4) {}

    // Derives an independent stream from user-facing identifiers.
    static CounterRng stream(std::uint64_t seed, std::uint64_t cell,
                             std::uint64_t replication, std::uint64_t purpose = 0) {
        using detail::splitmix64;
        std::uint64_t s = splitmix64(seed);
        s = splitmix64(s ^ splitmix64(cell + 0x1000000001ULL));
        s = splitmix64(s ^ splitmix64(replication + 0x2000000002ULL));
        s = splitmix64(s ^ splitmix64(purpose + 0x3000000003ULL));
        return CounterRng(s, splitmix64(s + 0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t next_u64() {
        if (idx_ >= 4) {
            // counter advances before each block, matching NumPy's Philox
            for (int i = 0; i < 4; ++i)
                if (++ctr_[i] != 0) break;
            buf_ = philox4x64(ctr_, key_);
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    // Uniform on the open interval (0,1); never returns an exact 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in [lo, hi] inclusive.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        // multiply-shift map; bias is < 2^-64 * span, negligible here
        const unsigned __int128 prod = static_cast<unsigned __int128>(next_u64()) * span;
        return lo + static_cast<std::uint64_t>(prod >> 64);
    }

    double normal() { return normal_quantile(uniform01()); }

    // Marsaglia-Tsang gamma variate, unit scale.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform01(), 1.0 / shape);
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
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> ctr_;
    std::array<std::uint64_t, 4> buf_{};
    int idx_;
};

}  // namespace smts
