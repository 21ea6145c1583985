#include "decaystream/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "decaystream/io.hpp"
#include "decaystream/offline.hpp"
#include "decaystream/oracle.hpp"
#include "decaystream/random.hpp"

namespace decaystream::harness {
namespace {

constexpr double kRevalidateTol = 1e-9;

double normal(Rng& rng) {
    // Box-Muller on the portable uniform source.
    const double u1 = std::max(uniform01(rng), 0x1.0p-53);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Point finish_point(std::vector<double> coords, const StreamShape& shape) {
    for (auto& x : coords) {
        x = std::clamp(x, 0.0, shape.side);
        if (shape.integer_coords) x = std::round(x);
    }
    return Point(std::move(coords));
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

struct Timer {
    bool enabled;
    std::vector<double> samples;

    template <typename Fn>
    void run(Fn&& fn) {
        if (!enabled) {
            fn();
            return;
        }
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
    }
};

void attach_oracle(MetricsRow& row, std::span<const WeightedPoint> stream, const DecayFunction& decay,
                   const CostFunction& cost, std::size_t k, std::span<const Point> centers) {
    const double recomputed = oracle::exact_decayed_cost(stream, decay, row.n, cost, centers);
    const double scale = std::max(std::abs(recomputed), 1e-300);
    if (std::abs(recomputed - row.final_cost) > kRevalidateTol * scale) {
        row.error = "final_cost disagrees with oracle recomputation";
        return;
    }
    try {
        const auto weighted = oracle::decayed_points(stream, decay, row.n);
        const auto opt = oracle::exhaustive_kmedian(weighted, cost, k);
        row.oracle_opt = opt.opt_cost;
        if (opt.opt_cost > 0.0) {
            row.ratio = row.final_cost / opt.opt_cost;
        } else {
            row.ratio = row.final_cost > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
        }
    } catch (const std::length_error& e) {
        row.error = e.what();
    }
}

std::vector<WeightedPoint> library_weights(std::span<const WeightedPoint> stream, const DecayFunction& decay,
                                           std::uint64_t now) {
    std::vector<WeightedPoint> out(stream.begin(), stream.end());
    const double log_now = decay.is_exponential() ? decay_weight(decay, now, now) : 0.0;
    for (auto& wp : out) {
        const double w = decay_weight(decay, wp.arrival_index, now);
        wp.weight = decay.is_exponential() ? std::exp2(w - log_now) : w;
    }
    return out;
}

MetricsRow run_poly(const Experiment& e, const PolyDecayConfig& base, std::uint64_t seed,
                    const std::vector<Point>& points) {
    MetricsRow row;
    row.seed = seed;
    PolyDecayConfig cfg = base;
    cfg.rng_seed = seed;
    PolyDecaySketch sketch(cfg);
    Timer timer{e.timing, {}};
    for (const auto& p : points) timer.run([&] { sketch.insert(p); });

    row.n = sketch.size();
    row.stored_points = sketch.stored_points();
    row.block_count = sketch.block_count();
    if (e.timing) row.update_ns = median(timer.samples);

    const Coreset summary = sketch.query();
    const KmResult km = km_ram(summary.entries, cfg.cost, cfg.k, mix_seed(seed, 1));
    const auto stream = io::as_stream(points);
    const auto decay = DecayFunction{Polynomial{cfg.s}};
    row.final_cost = clustering_cost(library_weights(stream, decay, row.n), cfg.cost, km.centers);
    if (e.oracle) attach_oracle(row, stream, decay, cfg.cost, cfg.k, km.centers);
    return row;
}

MetricsRow run_exp(const Experiment& e, const StreamConfig& base, std::uint64_t seed,
                   const std::vector<Point>& points) {
    MetricsRow row;
    row.seed = seed;
    StreamConfig cfg = base;
    cfg.rng_seed = seed;
    AmplifiedClusterer clusterer(cfg);
    Timer timer{e.timing, {}};
    for (const auto& p : points) timer.run([&] { clusterer.push(p); });

    const ExpDecayResult result = clusterer.finish();
    row.n = points.size();
    row.stored_points = 0;
    for (const auto& inst : clusterer.instances()) row.stored_points = std::max(row.stored_points, inst.peak_stored());
    row.phase_count = result.phase_count;
    if (e.timing) row.update_ns = median(timer.samples);

    const auto stream = io::as_stream(points);
    const auto decay = DecayFunction::exponential(cfg.h);
    row.final_cost = clustering_cost(library_weights(stream, decay, row.n), cfg.cost, result.centers);
    if (e.oracle) attach_oracle(row, stream, decay, cfg.cost, cfg.k, result.centers);
    return row;
}

MetricsRow run_seed(const Experiment& e, std::uint64_t seed) {
    MetricsRow row;
    row.seed = seed;
    try {
        StreamShape shape = e.shape;
        if (std::holds_alternative<StreamConfig>(e.algo)) shape.integer_coords = true;
        const auto points = generate_stream(e.generator, shape, seed);
        if (points.empty()) throw std::invalid_argument("generator produced an empty stream");
        if (const auto* poly = std::get_if<PolyDecayConfig>(&e.algo)) return run_poly(e, *poly, seed, points);
        return run_exp(e, std::get<StreamConfig>(e.algo), seed, points);
    } catch (const std::exception& ex) {
        row.error = ex.what();
    }
    return row;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <typename T>
std::string optional_field(const std::optional<T>& v) {
    if (!v) return "";
    if constexpr (std::is_floating_point_v<T>) {
        return format_double(*v);
    } else {
        return std::to_string(*v);
    }
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

std::vector<Point> generate_stream(const Generator& gen, const StreamShape& shape, std::uint64_t seed) {
    if (shape.dim == 0) throw std::invalid_argument("generate_stream: dim must be positive");
    if (!(shape.side > 0.0)) throw std::invalid_argument("generate_stream: side must be positive");
    Rng rng(mix_seed(seed, 0x51ea));
    std::vector<Point> out;
    out.reserve(shape.length);

    if (const auto* g = std::get_if<GaussianClusters>(&gen)) {
        if (g->clusters == 0) throw std::invalid_argument("generate_stream: need at least one cluster");
        std::vector<std::vector<double>> centers(g->clusters, std::vector<double>(shape.dim));
        for (auto& c : centers) {
            for (auto& x : c) x = (0.15 + 0.7 * uniform01(rng)) * shape.side;
        }
        std::vector<double> dir(shape.dim);
        double norm = 0.0;
        for (auto& x : dir) {
            x = normal(rng);
            norm += x * x;
        }
        norm = std::sqrt(std::max(norm, 1e-300));
        for (std::uint64_t t = 0; t < shape.length; ++t) {
            const auto& c = centers[static_cast<std::size_t>(rng() % g->clusters)];
            std::vector<double> coords(shape.dim);
            for (std::size_t j = 0; j < shape.dim; ++j) {
                coords[j] = c[j] + g->spread * normal(rng) + g->drift * static_cast<double>(t) * dir[j] / norm;
            }
            out.push_back(finish_point(std::move(coords), shape));
        }
    } else if (std::holds_alternative<UniformBox>(gen)) {
        for (std::uint64_t t = 0; t < shape.length; ++t) {
            std::vector<double> coords(shape.dim);
            for (auto& x : coords) x = uniform01(rng) * shape.side;
            out.push_back(finish_point(std::move(coords), shape));
        }
    } else {
        const auto& adv = std::get<Adversarial>(gen);
        const double jitter = std::max(1.0, 0.01 * shape.side);
        for (std::uint64_t t = 0; t < shape.length; ++t) {
            double anchor = 0.0;
            if (adv.kind == AdversarialKind::LateOutlier) {
                anchor = t * 20 >= shape.length * 19 ? shape.side : 0.0;
            } else {
                anchor = t % 2 == 0 ? 0.0 : shape.side;
            }
            std::vector<double> coords(shape.dim);
            for (auto& x : coords) x = anchor + (anchor == 0.0 ? 1.0 : -1.0) * jitter * uniform01(rng);
            out.push_back(finish_point(std::move(coords), shape));
        }
    }
    return out;
}

std::vector<MetricsRow> run_experiment(const Experiment& e) {
    if (e.seeds.empty()) throw std::invalid_argument("run_experiment: seeds must be nonempty");
    std::vector<MetricsRow> rows(e.seeds.size());
    std::size_t workers = e.workers > 0 ? e.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, e.seeds.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < e.seeds.size(); i = next++) rows[i] = run_seed(e, e.seeds[i]);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    if (!e.metrics_out.empty()) {
        std::ofstream out(e.metrics_out);
        if (!out) throw std::runtime_error("cannot open " + e.metrics_out + " for writing");
        write_metrics_csv(out, rows);
    }
    return rows;
}

std::string csv_header() {
    return "seed,n,stored_points,update_ns,final_cost,oracle_opt,ratio,phase_count,block_count,error";
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows) {
        out << r.seed << ',' << r.n << ',' << r.stored_points << ',' << optional_field(r.update_ns) << ','
            << format_double(r.final_cost) << ',' << optional_field(r.oracle_opt) << ','
            << optional_field(r.ratio) << ',' << optional_field(r.phase_count) << ','
            << optional_field(r.block_count) << ',' << csv_escape(r.error) << '\n';
    }
}

SpaceCurveReport fit_space_curve(std::span<const std::pair<double, double>> size_stored) {
    std::map<double, std::pair<double, std::size_t>> by_size;
    for (const auto& [size, stored] : size_stored) {
        if (!(size > 1.0)) throw std::invalid_argument("fit_space_curve: sizes must exceed 1");
        auto& slot = by_size[size];
        slot.first += stored;
        ++slot.second;
    }
    if (by_size.size() < 4) throw std::invalid_argument("fit_space_curve: need at least 4 distinct sizes");

    std::vector<double> xs, ys;
    for (const auto& [size, acc] : by_size) {
        xs.push_back(std::log(size));
        ys.push_back(acc.first / static_cast<double>(acc.second));
    }
    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    SpaceCurveReport report;
    report.sizes = xs.size();
    const double denom = m * sxx - sx * sx;
    report.slope = (m * sxy - sx * sy) / denom;
    report.intercept = (sy - report.slope * sx) / m;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (report.intercept + report.slope * xs[i]);
        ss += r * r;
    }
    report.residual = std::sqrt(ss / m);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double growth = ys[0] > 0.0 ? ys[i] / ys[0] : 0.0;
        report.growth_vs_log = std::max(report.growth_vs_log, growth / (xs[i] / xs[0]));
    }
    return report;
}

}  // namespace decaystream::harness
