// rng.hpp — Counter-based seeded streams: every (seed, node, pair) triple
// owns an independent reproducible stream, so parallel sampling stays
// bit-deterministic.

#pragma once

#include <cstdint>

namespace tcgs {

inline std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
{
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (a + 0xbf58476d1ce4e5b9ULL));
    h = mix64(h ^ (b + 0x94d049bb133111ebULL));
    return h;
}

class StreamRng {
public:
    explicit StreamRng(std::uint64_t key) : state_(key) {}

    std::uint64_t next()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (two uniforms per pair of calls).
    double normal()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform();
        while (u == 0.0) u = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double phi = 6.283185307179586476925 * uniform();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t state_{0};
    bool have_spare_{false};
    double spare_{0.0};
};

} // namespace tcgs
