#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace decaystream {

// A point in Euclidean R^d. Dimension is fixed per stream.
struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}
    Point(std::initializer_list<double> c) : coords(c) {}

    std::size_t dim() const { return coords.size(); }
    bool operator==(const Point&) const = default;
};

struct WeightedPoint {
    Point point;
    double weight = 1.0;
    // 1-based position in the stream.
    std::uint64_t arrival_index = 1;
};

struct Polynomial {
    double s;
};

struct Exponential {
    double h;  // half-life
};

// Either w(age) = age^(-s) or the fixed-weight view 2^(t/h).
struct DecayFunction {
    std::variant<Polynomial, Exponential> kind;

    static DecayFunction polynomial(double s);
    static DecayFunction exponential(double h);

    bool is_polynomial() const { return std::holds_alternative<Polynomial>(kind); }
    bool is_exponential() const { return std::holds_alternative<Exponential>(kind); }
};

enum class CostKind { KMedian, KMeans, Huber };

// f(p, C) = min_{c in C} rho(d(p, c)).
//
// KMedian: rho(d) = d, satisfies the triangle inequality (lambda = 1).
// KMeans:  rho(d) = d^2, 2-approximate triangle inequality.
// Huber:   rho(d) = d^2 / 2 for d <= threshold, threshold * (d - threshold / 2)
//          beyond; nondecreasing with rho(0) = 0 and a 2-approximate triangle
//          inequality inherited from the quadratic branch.
struct CostFunction {
    CostKind kind = CostKind::KMedian;
    double huber_threshold = 1.0;

    static CostFunction kmedian() { return {CostKind::KMedian, 1.0}; }
    static CostFunction kmeans() { return {CostKind::KMeans, 1.0}; }
    static CostFunction huber(double threshold);

    double lambda_ati() const;
    std::string name() const;
    double rho(double d) const;
};

CostFunction parse_cost_function(const std::string& name, double huber_threshold = 1.0);

struct QuerySpace {
    std::vector<WeightedPoint> points;
    CostFunction cost;
    std::size_t k = 1;
};

// Euclidean distance. Throws std::invalid_argument on dimension mismatch.
double distance(const Point& p, const Point& q);
double squared_distance(const Point& p, const Point& q);

// rho(d(p, q)) for the given cost function.
double cost_distance(const CostFunction& cost, const Point& p, const Point& q);

// Index of the nearest center together with its cost distance.
struct Nearest {
    std::size_t index;
    double cost;
};
Nearest nearest_center(const CostFunction& cost, const Point& p, std::span<const Point> centers);

// Polynomial: returns (now - t + 1)^(-s).
// Exponential: returns the log2 weight t/h of the fixed-weight view.
double decay_weight(const DecayFunction& df, std::uint64_t t, std::uint64_t now);

// sum_p w(p) * min_c rho(d(p, c)) for any nonempty center set.
double clustering_cost(std::span<const WeightedPoint> points, const CostFunction& cost,
                       std::span<const Point> centers);

// Same sum, restricted to |centers| == qs.k.
double decayed_cost(const QuerySpace& qs, std::span<const Point> centers);

double total_weight(std::span<const WeightedPoint> points);

// Base-2 log-domain arithmetic for exponentially decayed magnitudes.
namespace log2d {

inline constexpr double kZero = -std::numeric_limits<double>::infinity();

// log2(2^a + 2^b)
inline double add(double a, double b) {
    if (a == kZero) return b;
    if (b == kZero) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}

inline double from_linear(double x) { return x > 0.0 ? std::log2(x) : kZero; }

}  // namespace log2d

}  // namespace decaystream
