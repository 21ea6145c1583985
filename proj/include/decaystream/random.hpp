#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace decaystream {

using Rng = std::mt19937_64;

// splitmix64 finalizer; derives independent seeds for sub-streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in [0, 1). Bit-exact across standard libraries, unlike
// std::uniform_real_distribution.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Index drawn with probability proportional to weights[i]. All weights must be
// nonnegative with a positive sum.
inline std::size_t sample_index(Rng& rng, std::span<const double> weights, double total) {
    double target = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        if (target < weights[i]) return i;
        target -= weights[i];
    }
    // Rounding fell off the end: return the last positive entry.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) return i;
    }
    return 0;
}

}  // namespace decaystream
