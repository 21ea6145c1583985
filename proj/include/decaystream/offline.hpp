#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "decaystream/core.hpp"

namespace decaystream {

// Approximation factor certified by single-swap local search for k-median.
// Every downstream constant is derived from this value.
inline constexpr double kAlpha = 5.0;

// Relative improvement a swap must achieve to be accepted.
inline constexpr double kSwapTol = 1e-4;

inline constexpr double kDefaultDeltaCs = 0.05;
inline constexpr double kDefaultDeltaKm = 0.05;

// Leading constant of the sensitivity-sampling size bound. The worst-case
// constant makes every block smaller than ~1e5 points exact, so this is set to
// keep roughly 25-100 samples per reduced block at the default stream bound.
inline constexpr double kSampleConstant = 1e-4;

// Weighted point set with the accuracy it guarantees relative to its source.
struct Coreset {
    std::vector<WeightedPoint> entries;
    double epsilon = 0.0;
    std::uint64_t source_size = 0;

    double total_weight() const { return decaystream::total_weight(entries); }
    std::size_t size() const { return entries.size(); }
};

struct KmResult {
    std::vector<Point> centers;
    double lambda_cost = 0.0;
};

struct CsRamOptions {
    double delta = kDefaultDeltaCs;
    double sample_constant = kSampleConstant;
    // The bicriteria solution used for sensitivity bounds has this many
    // centers per requested center.
    std::size_t bicriteria_factor = 2;
};

// Sample count m = ceil(c * (k * d * ln k + ln(1/delta)) / epsilon^2), at least
// one sample per bicriteria center.
std::size_t size_budget(std::size_t k, std::size_t dim, double epsilon, const CsRamOptions& opts = {});

// Merges points with identical coordinates, summing weights. Order follows
// first occurrence; the earliest arrival index is kept.
std::vector<WeightedPoint> collapse_duplicates(std::span<const WeightedPoint> points);

// Offline epsilon-coreset by sensitivity sampling. Inputs with at most
// max(k, m) distinct points are returned exactly (duplicates merged).
Coreset cs_ram(std::span<const WeightedPoint> points, const CostFunction& cost, std::size_t k,
               double epsilon, std::uint64_t rng_seed, const CsRamOptions& opts = {});

// Weighted D^2 sampling. Returns min(k, #distinct points) distinct seeds.
std::vector<Point> d2_seeding(std::span<const WeightedPoint> points, const CostFunction& cost,
                              std::size_t k, std::uint64_t rng_seed);

// Discrete weighted k-median (or k-means / Huber) by single-swap local search
// seeded with d2_seeding. lambda_cost is recomputed exactly over the input.
KmResult km_ram(std::span<const WeightedPoint> points, const CostFunction& cost, std::size_t k,
                std::uint64_t rng_seed);

}  // namespace decaystream
