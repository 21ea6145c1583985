#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "decaystream/core.hpp"
#include "decaystream/offline.hpp"

namespace decaystream {

// Smallest integer x >= 2^i with (x / (x - 2^i + 1))^s <= (1 + eps) / (1 - eps).
// s = 0 gives x = 2^i. Throws std::invalid_argument for eps outside (0, 1) or
// s < 0.
std::uint64_t compute_marker(double s, double epsilon, unsigned level);

// Lazily extended table of merge markers x_i for fixed (s, eps).
class MarkerTable {
public:
    MarkerTable(double s, double epsilon);

    std::uint64_t at(unsigned level) const;
    double s() const { return s_; }
    double epsilon() const { return epsilon_; }

private:
    double s_;
    double epsilon_;
    mutable std::vector<std::uint64_t> x_;
};

// 1/2 * ((1 - eps) / a^s + (1 + eps) / b^s).
//
// The sketch calls it with a = age of the block's newest element and b = age of
// its oldest, so the result sits between (1 - eps) and (1 + eps) times every
// true weight in the block while the age ratio is within the marker bound.
double block_weight(double a_age, double b_age, double s, double epsilon);

// Contiguous stream interval [a, b] with an unweighted-by-decay coreset of its
// points. b - a + 1 == 2^level.
struct Block {
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    unsigned level = 0;
    Coreset summary;

    std::uint64_t span() const { return b - a + 1; }
};

struct PolyDecayConfig {
    double s = 1.0;
    double epsilon = 0.3;
    std::size_t k = 2;
    CostFunction cost = CostFunction::kmedian();
    // Upper bound on the stream length; fixes the per-reduce accuracy.
    std::uint64_t n_max = std::uint64_t{1} << 30;
    std::uint64_t rng_seed = 0;
    CsRamOptions cs;
};

// Epsilon-coreset of a polynomially decayed stream maintained by marker-driven
// merge-and-reduce over dyadic blocks.
//
// Single writer: insert() must not run concurrently with anything else;
// concurrent query() calls are fine.
class PolyDecaySketch {
public:
    explicit PolyDecaySketch(PolyDecayConfig config);

    // Appends p as arrival n + 1, then merges every block pair whose marker has
    // been reached, oldest first, until no trigger fires. Throws
    // std::length_error once the stream would exceed n_max.
    void insert(const Point& p);

    // Union of block summaries, each entry scaled by its block weight.
    Coreset query() const;

    // Blocks ordered oldest first; their intervals partition [1, n].
    std::span<const Block> blocks() const { return blocks_; }
    std::size_t block_count() const { return blocks_.size(); }
    std::uint64_t size() const { return n_; }
    std::size_t stored_points() const;

    double inner_epsilon() const { return inner_epsilon_; }
    const MarkerTable& markers() const { return markers_; }
    const PolyDecayConfig& config() const { return config_; }

private:
    bool merge_once();

    PolyDecayConfig config_;
    MarkerTable markers_;
    double inner_epsilon_;
    std::uint64_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<Block> blocks_;
};

// s ln n / ln((1 + eps) / (1 - eps)) + 2 log2 n + 2.
double block_count_bound(double s, double epsilon, std::uint64_t n);

}  // namespace decaystream
