#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "decaystream/core.hpp"
#include "decaystream/expdecay.hpp"
#include "decaystream/polydecay.hpp"

namespace decaystream::harness {

// Gaussian blobs whose centers move by `drift` per arrival along a fixed
// random direction.
struct GaussianClusters {
    std::size_t clusters = 3;
    double spread = 1.0;
    double drift = 0.0;
};

struct UniformBox {};

enum class AdversarialKind {
    // Tight cluster for 95% of the stream, then arrivals at the far corner.
    LateOutlier,
    // Arrivals alternate between two opposite corners.
    Alternating,
};

struct Adversarial {
    AdversarialKind kind = AdversarialKind::LateOutlier;
};

using Generator = std::variant<GaussianClusters, UniformBox, Adversarial>;

struct StreamShape {
    std::uint64_t length = 1000;
    std::size_t dim = 2;
    // Coordinates lie in [0, side]^dim.
    double side = 100.0;
    // Round coordinates so the minimum nonzero distance is at least 1.
    bool integer_coords = false;
};

std::vector<Point> generate_stream(const Generator& gen, const StreamShape& shape, std::uint64_t seed);

using AlgoParams = std::variant<PolyDecayConfig, StreamConfig>;

struct Experiment {
    Generator generator;
    StreamShape shape;
    AlgoParams algo;
    std::vector<std::uint64_t> seeds;
    bool oracle = true;
    bool timing = true;
    // 0 uses the hardware concurrency.
    std::size_t workers = 0;
    // CSV destination; empty skips writing.
    std::string metrics_out;
};

struct MetricsRow {
    std::uint64_t seed = 0;
    std::uint64_t n = 0;
    std::size_t stored_points = 0;
    std::optional<double> update_ns;
    double final_cost = 0.0;
    std::optional<double> oracle_opt;
    std::optional<double> ratio;
    std::optional<std::size_t> phase_count;
    std::optional<std::size_t> block_count;
    std::string error;
};

// One row per seed, in seed order. Seeds run on a worker pool with no shared
// algorithm state. Generator, algorithm and oracle failures are recorded in
// the row's error field and the remaining seeds still run.
//
// final_cost is the decayed cost of the reported centers at the end of the
// stream (exponential costs relative to the newest arrival's weight). With
// oracle enabled it is cross-checked against an independent recomputation and
// compared to the exhaustive discrete optimum when that fits the budget.
std::vector<MetricsRow> run_experiment(const Experiment& e);

std::string csv_header();
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

struct SpaceCurveReport {
    double slope = 0.0;      // d stored / d ln(size)
    double intercept = 0.0;
    double residual = 0.0;   // RMS of the fit
    // max over sizes of (stored / stored_at_smallest) / (ln size / ln smallest);
    // <= 1 means growth no faster than linear in the log of the size.
    double growth_vs_log = 0.0;
    std::size_t sizes = 0;
};

// Least-squares fit of stored points against ln(size). Rows sharing a size are
// averaged. Needs at least 4 distinct sizes, all > 1.
SpaceCurveReport fit_space_curve(std::span<const std::pair<double, double>> size_stored);

}  // namespace decaystream::harness
