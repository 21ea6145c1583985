#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "decaystream/core.hpp"
#include "decaystream/offline.hpp"

namespace decaystream::oracle {

// Upper limit on enumerated candidate center sets.
inline constexpr std::uint64_t kCombinatorialBudget = 50'000;

// Relative slack on ratio checks.
inline constexpr double kNumericSlack = 1e-9;

struct AllSubsets {};
struct LatticeGrid {
    double step;
};
struct SampledSubsets {
    std::size_t count;
    std::uint64_t seed;
};

// Finite surrogate for "every query": a list of k-center candidates.
struct QueryGrid {
    std::vector<std::vector<Point>> candidate_center_sets;
    std::variant<AllSubsets, LatticeGrid, SampledSubsets> provenance;
};

// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// Every k-subset of the distinct input locations. Refuses when the count
// exceeds kCombinatorialBudget.
QueryGrid all_subsets_grid(std::span<const WeightedPoint> points, std::size_t k);

// Every k-subset of the lattice with the given step covering the input's
// bounding box. Refuses past the budget.
QueryGrid lattice_grid(std::span<const WeightedPoint> points, std::size_t k, double step);

// count random k-subsets of distinct input locations.
QueryGrid sampled_subsets_grid(std::span<const WeightedPoint> points, std::size_t k,
                               std::size_t count, std::uint64_t seed);

// Points re-weighted by the decay function as seen at time `now`.
// Polynomial: (now - t + 1)^(-s). Exponential: 2^((t - now) / h), i.e. the
// fixed weight 2^(t/h) normalized so the arrival at `now` weighs 1.
std::vector<WeightedPoint> decayed_points(std::span<const WeightedPoint> points,
                                          const DecayFunction& decay, std::uint64_t now);

// sum_p w_decay(p) * f(p, centers); exponential costs are relative to the
// weight of the arrival at `now`.
double exact_decayed_cost(std::span<const WeightedPoint> points, const DecayFunction& decay,
                          std::uint64_t now, const CostFunction& cost, std::span<const Point> centers);

// log2 of the absolute exponentially decayed cost, sum 2^(t/h) f(p, centers).
double exact_exponential_log2_cost(std::span<const WeightedPoint> points, double h,
                                   const CostFunction& cost, std::span<const Point> centers);

struct ExhaustiveResult {
    std::vector<Point> centers;
    double opt_cost = 0.0;
};

// Exact optimum over all k-subsets of distinct input locations. Throws
// std::length_error when C(#distinct, k) exceeds the budget.
ExhaustiveResult exhaustive_kmedian(std::span<const WeightedPoint> points, const CostFunction& cost,
                                    std::size_t k);

struct CoresetReport {
    double max_rel_error = 0.0;
    bool pass = true;
    std::size_t candidates = 0;
    std::size_t failures = 0;
};

// Checks (1 - eps) f(P) <= f(Z) <= (1 + eps) f(P) on every candidate, with
// kNumericSlack added to eps.
CoresetReport verify_coreset(std::span<const WeightedPoint> coreset,
                             std::span<const WeightedPoint> reference, const CostFunction& cost,
                             const QueryGrid& grid, double epsilon);

}  // namespace decaystream::oracle
