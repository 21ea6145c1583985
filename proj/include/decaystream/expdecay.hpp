#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "decaystream/core.hpp"
#include "decaystream/offline.hpp"
#include "decaystream/random.hpp"

namespace decaystream {

// Parameters of the exponential-decay k-median stream clusterer.
//
// Inputs are expected to have minimum nonzero pairwise distance >= 1 and
// maximum distance <= delta_aspect; the upper bound is validated online.
struct StreamConfig {
    std::size_t k = 2;
    double h = 8.0;
    double delta_aspect = 1024.0;
    double beta = 2.0;
    double gamma = 10.0;
    double alpha = kAlpha;
    double delta = 0.05;
    // Parallel instances; 0 selects ceil(log2(1 / delta)).
    std::size_t amplification = 0;
    std::uint64_t rng_seed = 0;
    CostFunction cost = CostFunction::kmedian();

    void validate() const;

    // log2 W with W = delta_aspect / (2^(1/h) - 1).
    double log2_w() const;
    // ceil(h * log2 delta_aspect): OFL points per phase before storing verbatim.
    std::uint64_t verbatim_after() const;
    // k + ceil(h): distinct points stored verbatim before a phase change.
    std::size_t verbatim_quota() const;
    // (gamma - 1) k (1 + log2 W).
    double facility_limit() const;
    // facility_limit + k + ceil(h).
    double space_bound() const;
    std::size_t instances() const;
};

// (gamma + (1 + alpha beta) / (beta - 1)) * (1/gamma + 1 + (1 + alpha beta) / (gamma (beta - 1)))
double approximation_bound(double beta, double gamma, double alpha);

struct OflFacility {
    Point point;
    double log_weight = log2d::kZero;  // log2 of accumulated weight
    std::uint64_t opened_at = 0;
};

enum class SubPhase { Ofl, Verbatim };
enum class TriggerReason { CostOrFacilities, Verbatim };

// State of one instance. L, f, COST and all weights are log2 magnitudes.
struct PhaseState {
    StreamConfig params;
    double log_guess = 0.0;  // log2 L
    double log_facility_cost = 0.0;
    std::vector<OflFacility> facilities;
    double log_running_cost = log2d::kZero;
    std::uint64_t points_in_phase = 0;
    SubPhase subphase = SubPhase::Ofl;
    std::size_t verbatim_count = 0;
    Rng rng;

    std::uint64_t arrivals = 0;
    std::size_t phase_count = 0;
    // Service and reclustering cost of completed phases; an upper bound on the
    // cost of moving every absorbed point to the current facilities.
    double log_settled_cost = log2d::kZero;

    static PhaseState initial(const StreamConfig& cfg, std::uint64_t seed);
    std::size_t stored_points() const { return facilities.size(); }
};

// Starts a fresh phase with guess L = 2^log_guess: resets COST and counters and
// derives f = L / (k (1 + log2 W)).
void start_phase(PhaseState& ps, double log_guess);

// One online-facility-location step for the point arriving at index t with
// log-weight t / h. Opens a facility with probability min(w d / f, 1) (always
// when none exist); otherwise charges w d to COST and merges the weight into
// the nearest facility. Throws std::domain_error when a distance exceeds
// delta_aspect.
void ofl_step(PhaseState& ps, const Point& p, std::uint64_t t);

// Stores p verbatim, or folds it into a coincident stored point.
void verbatim_step(PhaseState& ps, const Point& p, std::uint64_t t);

// Called after each step. Switches OFL to the verbatim sub-phase once
// verbatim_after() points were read, and reports a phase change when COST or
// the facility count crosses its threshold or the verbatim quota is full.
std::optional<TriggerReason> check_phase_triggers(PhaseState& ps);

// Clusters the stored facilities to k weighted points with km_ram, raises
// L to max(beta L, lambda / (alpha gamma)) and starts the next phase.
void phase_change(PhaseState& ps);

struct ExpDecayResult {
    std::vector<Point> centers;
    // Upper bound on log2 of the absolute decayed cost of the centers.
    double log2_cost_estimate = log2d::kZero;
    std::size_t phase_count = 0;
    std::size_t peak_stored = 0;
    std::size_t instance = 0;
};

// One instance driven point by point.
class ExpDecayClusterer {
public:
    ExpDecayClusterer(const StreamConfig& cfg, std::uint64_t seed);

    // Processes the next arrival and, if a trigger fires, the phase change.
    // Throws std::logic_error if the stored-point bound is ever exceeded.
    void push(const Point& p);

    // Final clustering of the stored facilities; does not mutate the state.
    ExpDecayResult finish() const;

    const PhaseState& state() const { return state_; }
    std::size_t stored_points() const { return state_.stored_points(); }
    std::size_t peak_stored() const { return peak_stored_; }

private:
    PhaseState state_;
    std::size_t peak_stored_ = 0;
    std::size_t dim_ = 0;
};

// params.instances() independent instances fed the same arrivals. finish()
// returns the instance with the smallest internal cost estimate, since the
// exact cost of each candidate cannot be recomputed without the stream.
class AmplifiedClusterer {
public:
    explicit AmplifiedClusterer(const StreamConfig& cfg);

    void push(const Point& p);
    ExpDecayResult finish() const;

    std::span<const ExpDecayClusterer> instances() const { return instances_; }
    std::uint64_t size() const { return instances_.front().state().arrivals; }

private:
    std::vector<ExpDecayClusterer> instances_;
};

// Feeds the stream through an AmplifiedClusterer. Throws on an empty stream.
ExpDecayResult process_stream(const StreamConfig& cfg, std::span<const Point> stream);

}  // namespace decaystream
