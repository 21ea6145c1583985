#pragma once

// Helpers shared by unit and acceptance tests.

#include <cstdint>
#include <vector>

#include "decaystream/core.hpp"
#include "decaystream/oracle.hpp"
#include "decaystream/random.hpp"

namespace decaystream::testing {

// Gaussian-ish stream: `clusters` centers in [0, side]^dim, points within
// +-spread of a center, chosen round-robin. Unit weight, indices 1..n.
inline std::vector<WeightedPoint> clustered_stream(std::uint64_t seed, std::size_t n, std::size_t dim,
                                                   std::size_t clusters, double side, double spread) {
    Rng rng(seed);
    std::vector<std::vector<double>> centers(clusters, std::vector<double>(dim));
    for (auto& c : centers) {
        for (auto& x : c) x = uniform01(rng) * side;
    }
    std::vector<WeightedPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = centers[static_cast<std::size_t>(uniform01(rng) * clusters)];
        std::vector<double> coords(dim);
        for (std::size_t j = 0; j < dim; ++j) coords[j] = c[j] + (2.0 * uniform01(rng) - 1.0) * spread;
        out.push_back({Point(std::move(coords)), 1.0, i + 1});
    }
    return out;
}

// A reducer whose error on any query is known exactly: every weight is scaled
// by a factor in [1 - eps, 1 + eps], so every query cost moves by a factor in
// the same range. Duplicates are merged afterwards.
inline std::vector<WeightedPoint> perturb_reduce(const std::vector<WeightedPoint>& in, double eps, Rng& rng) {
    std::vector<WeightedPoint> out = in;
    for (auto& p : out) p.weight *= 1.0 - eps + 2.0 * eps * uniform01(rng);
    return out;
}

inline double grid_error(const std::vector<WeightedPoint>& summary, const std::vector<WeightedPoint>& reference,
                         const CostFunction& cost, const oracle::QueryGrid& grid) {
    return oracle::verify_coreset(summary, reference, cost, grid, 0.999).max_rel_error;
}

}  // namespace decaystream::testing
