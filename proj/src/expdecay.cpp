#include "decaystream/expdecay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace decaystream {
namespace {

// Relative tolerance on the aspect-ratio bound.
constexpr double kDeltaSlack = 1e-9;

double checked_distance(const StreamConfig& cfg, const Point& p, const Point& q) {
    const double d = distance(p, q);
    if (d > cfg.delta_aspect * (1.0 + kDeltaSlack)) {
        throw std::domain_error("aspect ratio bound violated: observed distance " + std::to_string(d) +
                                " exceeds delta_aspect = " + std::to_string(cfg.delta_aspect));
    }
    return d;
}

}  // namespace

void StreamConfig::validate() const {
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("h must be positive");
    if (!(delta_aspect >= 1.0) || !std::isfinite(delta_aspect)) {
        throw std::invalid_argument("delta_aspect must be >= 1");
    }
    if (!(beta > 1.0 && beta <= 2.0)) throw std::invalid_argument("beta must lie in (1, 2]");
    if (!(gamma >= 9.0)) throw std::invalid_argument("gamma must be >= 9");
    if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double StreamConfig::log2_w() const { return std::log2(delta_aspect) - std::log2(std::exp2(1.0 / h) - 1.0); }

std::uint64_t StreamConfig::verbatim_after() const {
    return static_cast<std::uint64_t>(std::ceil(h * std::log2(delta_aspect)));
}

std::size_t StreamConfig::verbatim_quota() const { return k + static_cast<std::size_t>(std::ceil(h)); }

double StreamConfig::facility_limit() const {
    return (gamma - 1.0) * static_cast<double>(k) * (1.0 + log2_w());
}

double StreamConfig::space_bound() const {
    return facility_limit() + static_cast<double>(k) + std::ceil(h);
}

std::size_t StreamConfig::instances() const {
    if (amplification > 0) return amplification;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(1.0 / delta))));
}

double approximation_bound(double beta, double gamma, double alpha) {
    const double carry = (1.0 + alpha * beta) / (beta - 1.0);
    return (gamma + carry) * (1.0 / gamma + 1.0 + carry / gamma);
}

PhaseState PhaseState::initial(const StreamConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    PhaseState ps;
    ps.params = cfg;
    ps.rng.seed(seed);
    start_phase(ps, 0.0);  // L = 1
    return ps;
}

void start_phase(PhaseState& ps, double log_guess) {
    const auto& cfg = ps.params;
    ps.log_guess = log_guess;
    ps.log_facility_cost = log_guess - std::log2(static_cast<double>(cfg.k) * (1.0 + cfg.log2_w()));
    ps.log_running_cost = log2d::kZero;
    ps.points_in_phase = 0;
    ps.subphase = SubPhase::Ofl;
    ps.verbatim_count = 0;
}

void ofl_step(PhaseState& ps, const Point& p, std::uint64_t t) {
    const auto& cfg = ps.params;
    const double log_w = static_cast<double>(t) / cfg.h;
    ++ps.points_in_phase;

    if (ps.facilities.empty()) {
        ps.facilities.push_back({p, log_w, t});
        return;
    }

    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ps.facilities.size(); ++j) {
        const double c = cfg.cost.rho(checked_distance(cfg, p, ps.facilities[j].point));
        if (c < best) {
            best = c;
            nearest = j;
        }
    }

    bool open = false;
    if (best > 0.0) {
        const double log_sigma = log_w + std::log2(best) - ps.log_facility_cost;
        open = log_sigma >= 0.0 || uniform01(ps.rng) < std::exp2(log_sigma);
    }
    if (open) {
        ps.facilities.push_back({p, log_w, t});
    } else {
        if (best > 0.0) ps.log_running_cost = log2d::add(ps.log_running_cost, log_w + std::log2(best));
        auto& q = ps.facilities[nearest];
        q.log_weight = log2d::add(q.log_weight, log_w);
    }
}

void verbatim_step(PhaseState& ps, const Point& p, std::uint64_t t) {
    const double log_w = static_cast<double>(t) / ps.params.h;
    for (auto& f : ps.facilities) {
        if (checked_distance(ps.params, p, f.point) == 0.0) {
            f.log_weight = log2d::add(f.log_weight, log_w);
            return;
        }
    }
    ps.facilities.push_back({p, log_w, t});
    ++ps.verbatim_count;
}

std::optional<TriggerReason> check_phase_triggers(PhaseState& ps) {
    const auto& cfg = ps.params;
    if (ps.subphase == SubPhase::Verbatim) {
        if (ps.verbatim_count >= cfg.verbatim_quota()) return TriggerReason::Verbatim;
        return std::nullopt;
    }
    const double log_cost_limit = std::log2(cfg.gamma) + ps.log_guess;
    if (ps.log_running_cost > log_cost_limit ||
        static_cast<double>(ps.facilities.size()) > cfg.facility_limit()) {
        return TriggerReason::CostOrFacilities;
    }
    if (ps.points_in_phase >= cfg.verbatim_after()) ps.subphase = SubPhase::Verbatim;
    return std::nullopt;
}

void phase_change(PhaseState& ps) {
    const auto& cfg = ps.params;
    double ref = log2d::kZero;
    for (const auto& f : ps.facilities) ref = std::max(ref, f.log_weight);

    std::vector<WeightedPoint> pts;
    pts.reserve(ps.facilities.size());
    for (const auto& f : ps.facilities) pts.push_back({f.point, std::exp2(f.log_weight - ref), f.opened_at});

    const KmResult km = km_ram(pts, cfg.cost, cfg.k, ps.rng());
    const double log_lambda = km.lambda_cost > 0.0 ? std::log2(km.lambda_cost) + ref : log2d::kZero;

    std::vector<OflFacility> next;
    next.reserve(km.centers.size());
    for (const auto& c : km.centers) {
        OflFacility f{c, log2d::kZero, 0};
        for (const auto& old : ps.facilities) {
            if (old.point == c) {
                f.opened_at = old.opened_at;
                break;
            }
        }
        next.push_back(std::move(f));
    }
    for (const auto& old : ps.facilities) {
        const auto near = nearest_center(cfg.cost, old.point, km.centers);
        next[near.index].log_weight = log2d::add(next[near.index].log_weight, old.log_weight);
    }
    ps.facilities = std::move(next);

    ps.log_settled_cost = log2d::add(log2d::add(ps.log_settled_cost, ps.log_running_cost), log_lambda);
    const double raised = ps.log_guess + std::log2(cfg.beta);
    const double from_lambda = log_lambda - std::log2(cfg.alpha * cfg.gamma);
    ++ps.phase_count;
    start_phase(ps, std::max(raised, from_lambda));
}

ExpDecayClusterer::ExpDecayClusterer(const StreamConfig& cfg, std::uint64_t seed)
    : state_(PhaseState::initial(cfg, seed)) {}

void ExpDecayClusterer::push(const Point& p) {
    if (state_.arrivals == 0) {
        dim_ = p.dim();
    } else if (p.dim() != dim_) {
        throw std::invalid_argument("dimension change mid-stream");
    }
    const std::uint64_t t = ++state_.arrivals;
    if (state_.subphase == SubPhase::Ofl) {
        ofl_step(state_, p, t);
    } else {
        verbatim_step(state_, p, t);
    }
    if (check_phase_triggers(state_)) phase_change(state_);
    peak_stored_ = std::max(peak_stored_, state_.stored_points());
    if (static_cast<double>(state_.stored_points()) > state_.params.space_bound()) {
        throw std::logic_error("stored points " + std::to_string(state_.stored_points()) +
                               " exceed the space bound");
    }
}

ExpDecayResult ExpDecayClusterer::finish() const {
    ExpDecayResult out;
    out.phase_count = state_.phase_count;
    out.peak_stored = peak_stored_;
    if (state_.facilities.empty()) return out;

    double ref = log2d::kZero;
    for (const auto& f : state_.facilities) ref = std::max(ref, f.log_weight);
    std::vector<WeightedPoint> pts;
    for (const auto& f : state_.facilities) pts.push_back({f.point, std::exp2(f.log_weight - ref), f.opened_at});

    Rng rng = state_.rng;
    const KmResult km = km_ram(pts, state_.params.cost, state_.params.k, rng());
    out.centers = km.centers;
    const double log_lambda = km.lambda_cost > 0.0 ? std::log2(km.lambda_cost) + ref : log2d::kZero;
    out.log2_cost_estimate =
        log2d::add(log2d::add(state_.log_settled_cost, state_.log_running_cost), log_lambda);
    return out;
}

AmplifiedClusterer::AmplifiedClusterer(const StreamConfig& cfg) {
    cfg.validate();
    const std::size_t m = cfg.instances();
    instances_.reserve(m);
    for (std::size_t j = 0; j < m; ++j) instances_.emplace_back(cfg, mix_seed(cfg.rng_seed, j));
}

void AmplifiedClusterer::push(const Point& p) {
    for (auto& inst : instances_) inst.push(p);
}

ExpDecayResult AmplifiedClusterer::finish() const {
    ExpDecayResult best;
    for (std::size_t j = 0; j < instances_.size(); ++j) {
        ExpDecayResult r = instances_[j].finish();
        r.instance = j;
        if (j == 0 || r.log2_cost_estimate < best.log2_cost_estimate) best = std::move(r);
    }
    return best;
}

ExpDecayResult process_stream(const StreamConfig& cfg, std::span<const Point> stream) {
    cfg.validate();
    if (stream.empty()) throw std::invalid_argument("process_stream: empty stream");
    AmplifiedClusterer clusterer(cfg);
    for (const auto& p : stream) clusterer.push(p);
    return clusterer.finish();
}

}  // namespace decaystream
