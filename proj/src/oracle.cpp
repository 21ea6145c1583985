#include "decaystream/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "decaystream/random.hpp"

// Evaluation here deliberately avoids the library's nearest-center and
// clustering-cost helpers so the oracle stays an independent recomputation.

namespace decaystream::oracle {
namespace {

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("oracle: dimension mismatch");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = static_cast<long double>(a[i]) - b[i];
        acc += d * d;
    }
    return static_cast<double>(std::sqrt(acc));
}

double rho(const CostFunction& cost, double d) {
    switch (cost.kind) {
        case CostKind::KMedian:
            return d;
        case CostKind::KMeans:
            return d * d;
        case CostKind::Huber: {
            const double t = cost.huber_threshold;
            return d <= t ? 0.5 * d * d : t * (d - 0.5 * t);
        }
    }
    return d;
}

double point_cost(const CostFunction& cost, const Point& p, std::span<const Point> centers) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : centers) best = std::min(best, rho(cost, euclid(p.coords, c.coords)));
    return best;
}

double weighted_cost(std::span<const WeightedPoint> pts, const CostFunction& cost,
                     std::span<const Point> centers) {
    if (centers.empty()) throw std::invalid_argument("oracle: empty center set");
    long double total = 0.0L;
    for (const auto& wp : pts) {
        if (wp.weight == 0.0) continue;
        total += static_cast<long double>(wp.weight) * point_cost(cost, wp.point, centers);
    }
    return static_cast<double>(total);
}

std::vector<Point> distinct_locations(std::span<const WeightedPoint> points) {
    std::map<std::vector<double>, bool> seen;
    std::vector<Point> out;
    for (const auto& wp : points) {
        if (seen.try_emplace(wp.point.coords, true).second) out.push_back(wp.point);
    }
    return out;
}

// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) return;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

QueryGrid subsets_of(const std::vector<Point>& locations, std::size_t k) {
    QueryGrid grid;
    grid.provenance = AllSubsets{};
    for_each_subset(locations.size(), k, [&](const std::vector<std::size_t>& idx) {
        std::vector<Point> cand;
        for (std::size_t i : idx) cand.push_back(locations[i]);
        grid.candidate_center_sets.push_back(std::move(cand));
    });
    return grid;
}

void check_budget(std::size_t n, std::size_t k) {
    if (k == 0) throw std::invalid_argument("oracle: k must be positive");
    if (k > n) {
        throw std::invalid_argument("oracle: k exceeds the number of distinct locations");
    }
    if (binomial(n, k) > kCombinatorialBudget) {
        throw std::length_error("oracle: C(" + std::to_string(n) + ", " + std::to_string(k) +
                                ") exceeds the combinatorial budget of " +
                                std::to_string(kCombinatorialBudget));
    }
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(acc);
}

QueryGrid all_subsets_grid(std::span<const WeightedPoint> points, std::size_t k) {
    const auto locations = distinct_locations(points);
    check_budget(locations.size(), k);
    return subsets_of(locations, k);
}

QueryGrid lattice_grid(std::span<const WeightedPoint> points, std::size_t k, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("lattice_grid: step must be positive");
    if (points.empty()) throw std::invalid_argument("lattice_grid: empty input");
    const std::size_t dim = points.front().point.dim();
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& wp : points) {
        for (std::size_t j = 0; j < dim; ++j) {
            lo[j] = std::min(lo[j], wp.point.coords[j]);
            hi[j] = std::max(hi[j], wp.point.coords[j]);
        }
    }
    std::vector<std::size_t> ticks(dim);
    std::uint64_t count = 1;
    for (std::size_t j = 0; j < dim; ++j) {
        ticks[j] = static_cast<std::size_t>(std::floor((hi[j] - lo[j]) / step)) + 1;
        count *= ticks[j];
        if (count > kCombinatorialBudget) {
            throw std::length_error("lattice_grid: lattice exceeds the combinatorial budget");
        }
    }
    std::vector<Point> lattice;
    std::vector<std::size_t> at(dim, 0);
    for (std::uint64_t c = 0; c < count; ++c) {
        Point p;
        for (std::size_t j = 0; j < dim; ++j) p.coords.push_back(lo[j] + step * static_cast<double>(at[j]));
        lattice.push_back(std::move(p));
        for (std::size_t j = 0; j < dim; ++j) {
            if (++at[j] < ticks[j]) break;
            at[j] = 0;
        }
    }
    check_budget(lattice.size(), k);
    auto grid = subsets_of(lattice, k);
    grid.provenance = LatticeGrid{step};
    return grid;
}

QueryGrid sampled_subsets_grid(std::span<const WeightedPoint> points, std::size_t k,
                               std::size_t count, std::uint64_t seed) {
    const auto locations = distinct_locations(points);
    if (k == 0 || k > locations.size()) {
        throw std::invalid_argument("sampled_subsets_grid: need 1 <= k <= #distinct locations");
    }
    if (count == 0) throw std::invalid_argument("sampled_subsets_grid: count must be positive");
    QueryGrid grid;
    grid.provenance = SampledSubsets{count, seed};
    Rng rng(seed);
    const std::size_t n = locations.size();
    for (std::size_t c = 0; c < count; ++c) {
        // Partial Fisher-Yates over an index permutation.
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::vector<Point> cand;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - i));
            std::swap(perm[i], perm[std::min(j, n - 1)]);
            cand.push_back(locations[perm[i]]);
        }
        grid.candidate_center_sets.push_back(std::move(cand));
    }
    return grid;
}

std::vector<WeightedPoint> decayed_points(std::span<const WeightedPoint> points,
                                          const DecayFunction& decay, std::uint64_t now) {
    std::vector<WeightedPoint> out;
    out.reserve(points.size());
    for (const auto& wp : points) {
        if (wp.arrival_index == 0 || wp.arrival_index > now) {
            throw std::invalid_argument("decayed_points: arrival index outside [1, now]");
        }
        WeightedPoint d = wp;
        if (const auto* poly = std::get_if<Polynomial>(&decay.kind)) {
            d.weight = std::pow(static_cast<double>(now - wp.arrival_index + 1), -poly->s);
        } else {
            const double h = std::get<Exponential>(decay.kind).h;
            d.weight = std::exp2(-static_cast<double>(now - wp.arrival_index) / h);
        }
        out.push_back(std::move(d));
    }
    return out;
}

double exact_decayed_cost(std::span<const WeightedPoint> points, const DecayFunction& decay,
                          std::uint64_t now, const CostFunction& cost, std::span<const Point> centers) {
    const auto weighted = decayed_points(points, decay, now);
    return weighted_cost(weighted, cost, centers);
}

double exact_exponential_log2_cost(std::span<const WeightedPoint> points, double h,
                                   const CostFunction& cost, std::span<const Point> centers) {
    if (centers.empty()) throw std::invalid_argument("oracle: empty center set");
    double acc = log2d::kZero;
    for (const auto& wp : points) {
        const double c = point_cost(cost, wp.point, centers);
        if (c <= 0.0) continue;
        acc = log2d::add(acc, static_cast<double>(wp.arrival_index) / h + std::log2(c));
    }
    return acc;
}

ExhaustiveResult exhaustive_kmedian(std::span<const WeightedPoint> points, const CostFunction& cost,
                                    std::size_t k) {
    if (points.empty()) throw std::invalid_argument("exhaustive_kmedian: empty input");
    if (k == 0) throw std::invalid_argument("exhaustive_kmedian: k must be positive");

    std::map<std::vector<double>, std::size_t> slot;
    std::vector<Point> locs;
    std::vector<double> mass;
    for (const auto& wp : points) {
        auto [it, inserted] = slot.try_emplace(wp.point.coords, locs.size());
        if (inserted) {
            locs.push_back(wp.point);
            mass.push_back(0.0);
        }
        mass[it->second] += wp.weight;
    }
    const std::size_t n = locs.size();
    ExhaustiveResult best;
    if (k >= n) {
        best.centers = locs;
        best.opt_cost = 0.0;
        return best;
    }
    check_budget(n, k);

    std::vector<double> table(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) table[i * n + j] = rho(cost, euclid(locs[i].coords, locs[j].coords));
    }
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_idx;
    for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
        long double total = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            double near = std::numeric_limits<double>::infinity();
            for (std::size_t c : idx) near = std::min(near, table[i * n + c]);
            total += static_cast<long double>(mass[i]) * near;
        }
        if (static_cast<double>(total) < best_cost) {
            best_cost = static_cast<double>(total);
            best_idx = idx;
        }
    });
    for (std::size_t i : best_idx) best.centers.push_back(locs[i]);
    best.opt_cost = best_cost;
    return best;
}

CoresetReport verify_coreset(std::span<const WeightedPoint> coreset,
                             std::span<const WeightedPoint> reference, const CostFunction& cost,
                             const QueryGrid& grid, double epsilon) {
    if (grid.candidate_center_sets.empty()) {
        throw std::invalid_argument("verify_coreset: empty query grid");
    }
    CoresetReport report;
    const double lo = 1.0 - epsilon - kNumericSlack;
    const double hi = 1.0 + epsilon + kNumericSlack;
    for (const auto& centers : grid.candidate_center_sets) {
        const double ref = weighted_cost(reference, cost, centers);
        const double approx = weighted_cost(coreset, cost, centers);
        double ratio;
        if (ref > 0.0) {
            ratio = approx / ref;
        } else {
            ratio = approx <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        }
        ++report.candidates;
        report.max_rel_error = std::max(report.max_rel_error, std::abs(ratio - 1.0));
        if (!(ratio >= lo && ratio <= hi)) {
            ++report.failures;
            report.pass = false;
        }
    }
    return report;
}

}  // namespace decaystream::oracle
