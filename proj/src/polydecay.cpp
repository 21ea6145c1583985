#include "decaystream/polydecay.hpp"

#include <cmath>
#include <stdexcept>

#include "decaystream/random.hpp"

namespace decaystream {
namespace {

void check_epsilon(double epsilon, const char* who) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument(std::string(who) + ": epsilon must lie in (0, 1)");
    }
}

bool marker_holds(double s, double bound, std::uint64_t x, std::uint64_t gap) {
    const double ratio = static_cast<double>(x) / static_cast<double>(x - gap);
    return std::pow(ratio, s) <= bound;
}

}  // namespace

std::uint64_t compute_marker(double s, double epsilon, unsigned level) {
    check_epsilon(epsilon, "compute_marker");
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("compute_marker: s must be finite and nonnegative");
    }
    if (level > 62) throw std::invalid_argument("compute_marker: level too large");

    const std::uint64_t span = std::uint64_t{1} << level;
    const std::uint64_t gap = span - 1;
    if (s == 0.0 || gap == 0) return span;

    const double bound = (1.0 + epsilon) / (1.0 - epsilon);
    // x / (x - gap) <= r  <=>  x >= r * gap / (r - 1), r = bound^(1/s).
    const double r = std::pow(bound, 1.0 / s);
    double guess = std::ceil(r * static_cast<double>(gap) / (r - 1.0));
    std::uint64_t x = std::max<std::uint64_t>(span, static_cast<std::uint64_t>(guess));
    while (!marker_holds(s, bound, x, gap)) ++x;
    while (x > span && marker_holds(s, bound, x - 1, gap)) --x;
    return x;
}

MarkerTable::MarkerTable(double s, double epsilon) : s_(s), epsilon_(epsilon) {
    check_epsilon(epsilon, "MarkerTable");
    if (!(s >= 0.0)) throw std::invalid_argument("MarkerTable: s must be nonnegative");
}

std::uint64_t MarkerTable::at(unsigned level) const {
    while (x_.size() <= level) {
        x_.push_back(compute_marker(s_, epsilon_, static_cast<unsigned>(x_.size())));
    }
    return x_[level];
}

double block_weight(double a_age, double b_age, double s, double epsilon) {
    return 0.5 * ((1.0 - epsilon) * std::pow(a_age, -s) + (1.0 + epsilon) * std::pow(b_age, -s));
}

double block_count_bound(double s, double epsilon, std::uint64_t n) {
    const double nd = static_cast<double>(std::max<std::uint64_t>(n, 1));
    return s * std::log(nd) / std::log((1.0 + epsilon) / (1.0 - epsilon)) + 2.0 * std::log2(nd) + 2.0;
}

PolyDecaySketch::PolyDecaySketch(PolyDecayConfig config)
    : config_(std::move(config)), markers_(config_.s, config_.epsilon), inner_epsilon_(0.0) {
    if (config_.k == 0) throw std::invalid_argument("PolyDecaySketch: k must be positive");
    if (config_.n_max < 2) throw std::invalid_argument("PolyDecaySketch: n_max must be at least 2");
    inner_epsilon_ = config_.epsilon / (3.0 * std::log2(static_cast<double>(config_.n_max)));
}

void PolyDecaySketch::insert(const Point& p) {
    if (n_ >= config_.n_max) {
        throw std::length_error("stream too long: more than n_max = " + std::to_string(config_.n_max) +
                                " points");
    }
    if (n_ == 0) {
        dim_ = p.dim();
    } else if (p.dim() != dim_) {
        throw std::invalid_argument("dimension change mid-stream");
    }
    ++n_;
    Block fresh;
    fresh.a = fresh.b = n_;
    fresh.level = 0;
    fresh.summary.entries.push_back(WeightedPoint{p, 1.0, n_});
    fresh.summary.epsilon = inner_epsilon_;
    fresh.summary.source_size = 1;
    blocks_.push_back(std::move(fresh));

    while (merge_once()) {
    }
}

// Merges the oldest aligned pair of equal-level blocks whose marker fired.
bool PolyDecaySketch::merge_once() {
    for (std::size_t idx = 0; idx + 1 < blocks_.size(); ++idx) {
        const Block& left = blocks_[idx];
        const Block& right = blocks_[idx + 1];
        if (right.level != left.level) continue;
        const unsigned level = left.level + 1;
        const std::uint64_t span = std::uint64_t{1} << level;
        if ((left.a - 1) % span != 0) continue;
        if (left.a + markers_.at(level) > n_) continue;

        std::vector<WeightedPoint> merged = left.summary.entries;
        merged.insert(merged.end(), right.summary.entries.begin(), right.summary.entries.end());

        Block out;
        out.a = left.a;
        out.b = right.b;
        out.level = level;
        out.summary = cs_ram(merged, config_.cost, config_.k, inner_epsilon_,
                             mix_seed(config_.rng_seed, (left.a << 6) | level), config_.cs);
        out.summary.source_size = left.summary.source_size + right.summary.source_size;

        blocks_[idx] = std::move(out);
        blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
        return true;
    }
    return false;
}

Coreset PolyDecaySketch::query() const {
    Coreset out;
    out.epsilon = config_.epsilon;
    out.source_size = n_;
    for (const auto& block : blocks_) {
        const double newest_age = static_cast<double>(n_ - block.b + 1);
        const double oldest_age = static_cast<double>(n_ - block.a + 1);
        const double u = block_weight(newest_age, oldest_age, config_.s, config_.epsilon);
        for (const auto& wp : block.summary.entries) {
            WeightedPoint scaled = wp;
            scaled.weight *= u;
            out.entries.push_back(std::move(scaled));
        }
    }
    return out;
}

std::size_t PolyDecaySketch::stored_points() const {
    std::size_t total = 0;
    for (const auto& block : blocks_) total += block.summary.entries.size();
    return total;
}

}  // namespace decaystream
