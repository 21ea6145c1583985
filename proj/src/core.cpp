#include "decaystream/core.hpp"

#include <stdexcept>

namespace decaystream {

DecayFunction DecayFunction::polynomial(double s) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("polynomial decay requires s > 0");
    }
    return {Polynomial{s}};
}

DecayFunction DecayFunction::exponential(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("exponential decay requires h > 0");
    }
    return {Exponential{h}};
}

CostFunction CostFunction::huber(double threshold) {
    if (!(threshold > 0.0)) {
        throw std::invalid_argument("huber threshold must be positive");
    }
    return {CostKind::Huber, threshold};
}

double CostFunction::lambda_ati() const {
    switch (kind) {
        case CostKind::KMedian:
            return 1.0;
        case CostKind::KMeans:
        case CostKind::Huber:
            return 2.0;
    }
    return 2.0;
}

std::string CostFunction::name() const {
    switch (kind) {
        case CostKind::KMedian:
            return "kmedian";
        case CostKind::KMeans:
            return "kmeans";
        case CostKind::Huber:
            return "huber";
    }
    return "unknown";
}

double CostFunction::rho(double d) const {
    switch (kind) {
        case CostKind::KMedian:
            return d;
        case CostKind::KMeans:
            return d * d;
        case CostKind::Huber:
            if (d <= huber_threshold) return 0.5 * d * d;
            return huber_threshold * (d - 0.5 * huber_threshold);
    }
    return d;
}

CostFunction parse_cost_function(const std::string& name, double huber_threshold) {
    if (name == "kmedian") return CostFunction::kmedian();
    if (name == "kmeans") return CostFunction::kmeans();
    if (name == "huber") return CostFunction::huber(huber_threshold);
    throw std::invalid_argument("unknown cost function '" + name + "'");
}

double squared_distance(const Point& p, const Point& q) {
    if (p.dim() != q.dim()) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(p.dim()) + " vs " +
                                    std::to_string(q.dim()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        const double diff = p.coords[i] - q.coords[i];
        acc += diff * diff;
    }
    return acc;
}

double distance(const Point& p, const Point& q) { return std::sqrt(squared_distance(p, q)); }

double cost_distance(const CostFunction& cost, const Point& p, const Point& q) {
    if (cost.kind == CostKind::KMeans) return squared_distance(p, q);
    return cost.rho(distance(p, q));
}

Nearest nearest_center(const CostFunction& cost, const Point& p, std::span<const Point> centers) {
    if (centers.empty()) {
        throw std::invalid_argument("nearest_center: empty center set");
    }
    Nearest best{0, cost_distance(cost, p, centers[0])};
    for (std::size_t j = 1; j < centers.size(); ++j) {
        const double c = cost_distance(cost, p, centers[j]);
        if (c < best.cost) best = {j, c};
    }
    return best;
}

double decay_weight(const DecayFunction& df, std::uint64_t t, std::uint64_t now) {
    if (t == 0 || t > now) {
        throw std::invalid_argument("decay_weight: arrival index must satisfy 1 <= t <= now");
    }
    if (const auto* poly = std::get_if<Polynomial>(&df.kind)) {
        const double age = static_cast<double>(now - t + 1);
        return std::pow(age, -poly->s);
    }
    const auto& ex = std::get<Exponential>(df.kind);
    return static_cast<double>(t) / ex.h;
}

double clustering_cost(std::span<const WeightedPoint> points, const CostFunction& cost,
                       std::span<const Point> centers) {
    if (centers.empty()) {
        throw std::invalid_argument("clustering_cost: empty center set");
    }
    double total = 0.0;
    for (const auto& wp : points) {
        if (wp.weight == 0.0) continue;
        total += wp.weight * nearest_center(cost, wp.point, centers).cost;
    }
    return total;
}

double decayed_cost(const QuerySpace& qs, std::span<const Point> centers) {
    if (centers.empty()) {
        throw std::invalid_argument("decayed_cost: empty center set");
    }
    if (centers.size() != qs.k) {
        throw std::invalid_argument("decayed_cost: expected " + std::to_string(qs.k) +
                                    " centers, got " + std::to_string(centers.size()));
    }
    return clustering_cost(qs.points, qs.cost, centers);
}

double total_weight(std::span<const WeightedPoint> points) {
    double w = 0.0;
    for (const auto& p : points) w += p.weight;
    return w;
}

}  // namespace decaystream
