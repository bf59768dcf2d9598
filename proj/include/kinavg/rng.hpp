#pragma once

// Reproducible random streams. Every (cell, replication) pair gets its own
// stream, derived from the base seed by a pure mixing function, so results do
// not depend on scheduling order. Generator: xoshiro256++ seeded by splitmix64
// (public-domain algorithms by Blackman and Vigna). Gaussians via Box-Muller,
// kept implementation-pinned so output bytes are stable across platforms.

#include <cmath>
#include <cstdint>

namespace kinavg {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Pure function (base_seed, cell, replication) -> stream key.
inline std::uint64_t stream_key(std::uint64_t base, std::uint64_t cell, std::uint64_t rep) {
    std::uint64_t s = base;
    s ^= splitmix64(cell) + 0x632be59bd9b4e019ULL;
    std::uint64_t t = s + 0x9e3779b97f4a7c15ULL * (rep + 1);
    return splitmix64(t);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t key) {
        std::uint64_t sm = key;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in (0,1); never returns 0.
    double uniform() {
        return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace kinavg
