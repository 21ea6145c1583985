#include "decaystream/offline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "decaystream/random.hpp"

namespace decaystream {
namespace {

std::vector<std::size_t> seed_indices(std::span<const WeightedPoint> pts, const CostFunction& cost,
                                      std::size_t k, Rng& rng) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> chosen;
    if (n == 0 || k == 0) return chosen;

    std::vector<double> mass(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mass[i] = pts[i].weight;
        total += mass[i];
    }
    if (!(total > 0.0)) {
        std::fill(mass.begin(), mass.end(), 1.0);
        total = static_cast<double>(n);
    }
    chosen.push_back(sample_index(rng, mass, total));

    // Nearest-seed cost for every point; sampling proportional to w * cost
    // is D^2 sampling for k-means and D^1 sampling for k-median.
    std::vector<double> near(n);
    for (std::size_t i = 0; i < n; ++i) {
        near[i] = cost_distance(cost, pts[i].point, pts[chosen[0]].point);
    }
    while (chosen.size() < k) {
        total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mass[i] = std::max(pts[i].weight, 0.0) * near[i];
            total += mass[i];
        }
        if (!(total > 0.0)) {
            // Remaining positive-weight mass sits on chosen seeds; fall back to
            // any unchosen distinct location, zero-weight ones included.
            bool found = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (near[i] > 0.0) {
                    mass[i] = 1.0;
                    found = true;
                } else {
                    mass[i] = 0.0;
                }
            }
            if (!found) break;
            total = 0.0;
            for (double m : mass) total += m;
        }
        const std::size_t next = sample_index(rng, mass, total);
        chosen.push_back(next);
        for (std::size_t i = 0; i < n; ++i) {
            near[i] = std::min(near[i], cost_distance(cost, pts[i].point, pts[next].point));
        }
    }
    return chosen;
}

void check_nonempty(std::span<const WeightedPoint> points, const char* who) {
    if (points.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty input");
    }
}

}  // namespace

std::size_t size_budget(std::size_t k, std::size_t dim, double epsilon, const CsRamOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("size_budget: epsilon must lie in (0, 1)");
    }
    const double kd = static_cast<double>(k) * static_cast<double>(std::max<std::size_t>(dim, 1));
    const double dims = kd * std::log(static_cast<double>(std::max<std::size_t>(k, 1)));
    const double m = std::ceil(opts.sample_constant * (dims + std::log(1.0 / opts.delta)) /
                               (epsilon * epsilon));
    const double floor_m = static_cast<double>(k * opts.bicriteria_factor);
    return static_cast<std::size_t>(std::min(std::max(m, floor_m), 1e12));
}

std::vector<WeightedPoint> collapse_duplicates(std::span<const WeightedPoint> points) {
    std::vector<WeightedPoint> out;
    std::map<std::vector<double>, std::size_t> seen;
    for (const auto& wp : points) {
        auto [it, inserted] = seen.try_emplace(wp.point.coords, out.size());
        if (inserted) {
            out.push_back(wp);
        } else {
            auto& slot = out[it->second];
            slot.weight += wp.weight;
            slot.arrival_index = std::min(slot.arrival_index, wp.arrival_index);
        }
    }
    return out;
}

std::vector<Point> d2_seeding(std::span<const WeightedPoint> points, const CostFunction& cost,
                              std::size_t k, std::uint64_t rng_seed) {
    check_nonempty(points, "d2_seeding");
    if (k == 0) throw std::invalid_argument("d2_seeding: k must be positive");
    Rng rng(rng_seed);
    std::vector<Point> out;
    for (std::size_t idx : seed_indices(points, cost, k, rng)) out.push_back(points[idx].point);
    return out;
}

Coreset cs_ram(std::span<const WeightedPoint> points, const CostFunction& cost, std::size_t k,
               double epsilon, std::uint64_t rng_seed, const CsRamOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("cs_ram: epsilon must lie in (0, 1)");
    }
    check_nonempty(points, "cs_ram");
    if (k == 0) throw std::invalid_argument("cs_ram: k must be positive");

    Coreset out;
    out.epsilon = epsilon;
    out.source_size = points.size();

    auto distinct = collapse_duplicates(points);
    const std::size_t m = size_budget(k, points.front().point.dim(), epsilon, opts);
    if (distinct.size() <= std::max(k, m)) {
        out.entries = std::move(distinct);
        return out;
    }

    Rng rng(rng_seed);
    const std::size_t n = distinct.size();
    const auto bicriteria = seed_indices(distinct, cost, k * opts.bicriteria_factor, rng);
    std::vector<Point> centers;
    for (std::size_t idx : bicriteria) centers.push_back(distinct[idx].point);

    std::vector<std::size_t> owner(n);
    std::vector<double> point_cost(n);
    std::vector<double> cluster_weight(centers.size(), 0.0);
    double total_cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto near = nearest_center(cost, distinct[i].point, centers);
        owner[i] = near.index;
        point_cost[i] = distinct[i].weight * near.cost;
        cluster_weight[near.index] += distinct[i].weight;
        total_cost += point_cost[i];
    }

    // Sensitivity upper bound: share of the bicriteria cost plus share of the
    // owning cluster's weight.
    std::vector<double> sensitivity(n);
    double total_sensitivity = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = cluster_weight[owner[i]] > 0.0 ? distinct[i].weight / cluster_weight[owner[i]] : 0.0;
        if (total_cost > 0.0) s += point_cost[i] / total_cost;
        sensitivity[i] = s;
        total_sensitivity += s;
    }

    std::vector<double> sampled_weight(n, 0.0);
    const double md = static_cast<double>(m);
    for (std::size_t draw = 0; draw < m; ++draw) {
        const std::size_t i = sample_index(rng, sensitivity, total_sensitivity);
        const double prob = sensitivity[i] / total_sensitivity;
        sampled_weight[i] += distinct[i].weight / (md * prob);
    }

    // Rescale each bicriteria cluster to its exact mass; a cluster that drew
    // no sample is represented by its center.
    std::vector<double> cluster_sampled(centers.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) cluster_sampled[owner[i]] += sampled_weight[i];
    for (std::size_t i = 0; i < n; ++i) {
        if (sampled_weight[i] <= 0.0) continue;
        WeightedPoint wp = distinct[i];
        wp.weight = sampled_weight[i] * cluster_weight[owner[i]] / cluster_sampled[owner[i]];
        out.entries.push_back(std::move(wp));
    }
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (cluster_sampled[j] <= 0.0 && cluster_weight[j] > 0.0) {
            WeightedPoint wp = distinct[bicriteria[j]];
            wp.weight = cluster_weight[j];
            out.entries.push_back(std::move(wp));
        }
    }
    return out;
}

KmResult km_ram(std::span<const WeightedPoint> points, const CostFunction& cost, std::size_t k,
                std::uint64_t rng_seed) {
    check_nonempty(points, "km_ram");
    if (k == 0) throw std::invalid_argument("km_ram: k must be positive");

    const auto distinct = collapse_duplicates(points);
    const std::size_t n = distinct.size();
    KmResult result;
    if (k >= n) {
        for (const auto& wp : distinct) result.centers.push_back(wp.point);
        result.lambda_cost = 0.0;
        return result;
    }

    Rng rng(rng_seed);
    std::vector<std::size_t> medians = seed_indices(distinct, cost, k, rng);

    // Nearest and second-nearest median (by slot) for every point.
    std::vector<std::size_t> first(n), second(n);
    std::vector<double> d1(n), d2(n);
    auto assign = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d1[i] = d2[i] = std::numeric_limits<double>::infinity();
            first[i] = second[i] = 0;
            for (std::size_t j = 0; j < medians.size(); ++j) {
                const double c = cost_distance(cost, distinct[i].point, distinct[medians[j]].point);
                if (c < d1[i]) {
                    d2[i] = d1[i];
                    second[i] = first[i];
                    d1[i] = c;
                    first[i] = j;
                } else if (c < d2[i]) {
                    d2[i] = c;
                    second[i] = j;
                }
            }
            total += distinct[i].weight * d1[i];
        }
        return total;
    };

    double current = assign();
    std::vector<char> is_median(n, 0);
    for (std::size_t idx : medians) is_median[idx] = 1;
    std::vector<double> to_candidate(n);
    std::vector<double> swap_cost(medians.size());

    bool improved = true;
    while (improved && current > 0.0) {
        improved = false;
        for (std::size_t cand = 0; cand < n; ++cand) {
            if (is_median[cand]) continue;
            for (std::size_t i = 0; i < n; ++i) {
                to_candidate[i] = cost_distance(cost, distinct[i].point, distinct[cand].point);
            }
            std::fill(swap_cost.begin(), swap_cost.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double w = distinct[i].weight;
                for (std::size_t j = 0; j < medians.size(); ++j) {
                    const double without = first[i] == j ? d2[i] : d1[i];
                    swap_cost[j] += w * std::min(without, to_candidate[i]);
                }
            }
            const auto best = std::min_element(swap_cost.begin(), swap_cost.end());
            if (*best < (1.0 - kSwapTol) * current) {
                const auto slot = static_cast<std::size_t>(best - swap_cost.begin());
                is_median[medians[slot]] = 0;
                medians[slot] = cand;
                is_median[cand] = 1;
                current = assign();
                improved = true;
            }
        }
    }

    for (std::size_t idx : medians) result.centers.push_back(distinct[idx].point);
    result.lambda_cost = clustering_cost(points, cost, result.centers);
    return result;
}

}  // namespace decaystream
