// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "decaystream/expdecay.hpp"
#include "decaystream/harness.hpp"
#include "decaystream/oracle.hpp"
#include "decaystream/polydecay.hpp"
#include "support.hpp"

using namespace decaystream;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Criteria 1 and 2 share the 20 streams.
struct PolyRun {
    int passes = 0;
    double worst_error = 0.0;
    bool blocks_ok = true;
    std::size_t worst_blocks = 0;
    double worst_block_slack = 1e300;
    double seconds = 0.0;
};

PolyRun run_poly_streams() {
    const double s_values[] = {0.5, 1.0, 2.0};
    const double eps = 0.3;
    PolyRun out;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t i = 0; i < 20; ++i) {
        const std::size_t k = 1 + i % 3;
        const double s = s_values[(i / 3) % 3];
        harness::StreamShape shape;
        shape.length = 2000;
        shape.dim = 2;
        shape.side = 100.0;
        const auto points = harness::generate_stream(harness::GaussianClusters{3, 4.0, 0.0}, shape, 1000 + i);

        PolyDecayConfig cfg;
        cfg.s = s;
        cfg.epsilon = eps;
        cfg.k = k;
        cfg.rng_seed = i;
        PolyDecaySketch sk(cfg);
        for (const auto& p : points) {
            sk.insert(p);
            const double bound = block_count_bound(s, eps, sk.size());
            if (static_cast<double>(sk.block_count()) > bound) out.blocks_ok = false;
            out.worst_block_slack = std::min(out.worst_block_slack, bound - static_cast<double>(sk.block_count()));
            out.worst_blocks = std::max(out.worst_blocks, sk.block_count());
        }

        std::vector<WeightedPoint> stream;
        for (std::size_t t = 0; t < points.size(); ++t) stream.push_back({points[t], 1.0, t + 1});
        const auto reference = oracle::decayed_points(stream, DecayFunction::polynomial(s), stream.size());
        const auto grid = oracle::sampled_subsets_grid(stream, k, 100, 5000 + i);
        const auto rep = oracle::verify_coreset(sk.query().entries, reference, cfg.cost, grid, eps);
        out.passes += rep.pass;
        out.worst_error = std::max(out.worst_error, rep.max_rel_error);
    }
    out.seconds = seconds_since(t0);
    return out;
}

Outcome criterion3() {
    std::size_t checked = 0;
    for (double s : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        for (double eps : {0.1, 0.3, 0.5}) {
            const double bound = (1.0 + eps) / (1.0 - eps);
            for (unsigned i = 0; i <= 20; ++i) {
                const std::uint64_t span = std::uint64_t{1} << i;
                const std::uint64_t x = compute_marker(s, eps, i);
                const auto holds = [&](std::uint64_t y) {
                    return std::pow(static_cast<double>(y) / static_cast<double>(y - span + 1), s) <= bound;
                };
                ++checked;
                if (x < span || !holds(x)) return {false, fmt("x_%u(s=%g, eps=%g) = %llu violates the inequality", i, s, eps, (unsigned long long)x)};
                if (x > span && holds(x - 1)) return {false, fmt("x_%u(s=%g, eps=%g) = %llu is not minimal", i, s, eps, (unsigned long long)x)};
                if (s == 0.0 && x != span) return {false, fmt("s=0 gave x_%u = %llu", i, (unsigned long long)x)};
            }
        }
    }
    return {true, fmt("%zu markers rechecked; s=0 gives 2^i", checked)};
}

Outcome criterion4() {
    Rng rng(2024);
    const auto cost = CostFunction::kmedian();
    double worst_union = -1e300;
    double worst_comp = -1e300;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n1 = 5 + trial % 21;
        const std::size_t n2 = 5 + (trial * 7) % 21;
        const auto p1 = testing::clustered_stream(3 * trial + 1, n1, 2, 2, 50.0, 5.0);
        auto p2 = testing::clustered_stream(3 * trial + 2, n2, 2, 3, 50.0, 5.0);
        for (auto& p : p2) p.arrival_index += n1;
        std::vector<WeightedPoint> both = p1;
        both.insert(both.end(), p2.begin(), p2.end());
        const auto grid = oracle::sampled_subsets_grid(both, 1 + trial % 3, 60, trial);

        const auto s1 = testing::perturb_reduce(p1, 0.4 * uniform01(rng), rng);
        const auto s2 = testing::perturb_reduce(p2, 0.4 * uniform01(rng), rng);
        std::vector<WeightedPoint> u = s1;
        u.insert(u.end(), s2.begin(), s2.end());
        const double e1 = testing::grid_error(s1, p1, cost, grid);
        const double e2 = testing::grid_error(s2, p2, cost, grid);
        const double eu = testing::grid_error(u, both, cost, grid);
        worst_union = std::max(worst_union, eu - std::max(e1, e2));

        const auto r = testing::perturb_reduce(u, 0.3 * uniform01(rng), rng);
        const double d = testing::grid_error(r, u, cost, grid);
        const double er = testing::grid_error(r, both, cost, grid);
        worst_comp = std::max(worst_comp, er - ((1.0 + eu) * (1.0 + d) - 1.0));
    }
    const bool pass = worst_union <= 1e-9 && worst_comp <= 1e-9;
    return {pass, fmt("200 trials; max excess over bound: union %.3g, composition %.3g", worst_union, worst_comp)};
}

Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    const double bound = approximation_bound(2.0, 10.0, kAlpha);
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const std::size_t dim = 1 + i % 2;
        const double h = (i / 2) % 2 ? 8.0 : 4.0;
        StreamConfig cfg;
        cfg.k = 2;
        cfg.h = h;
        cfg.delta_aspect = 1024.0;
        cfg.rng_seed = i;
        harness::StreamShape shape;
        shape.length = 300;
        shape.dim = dim;
        shape.side = std::floor(cfg.delta_aspect / std::sqrt(static_cast<double>(dim)));
        shape.integer_coords = true;
        const auto points = harness::generate_stream(harness::GaussianClusters{2, 15.0, 0.0}, shape, 2000 + i);

        const auto result = process_stream(cfg, points);
        std::vector<WeightedPoint> stream;
        for (std::size_t t = 0; t < points.size(); ++t) stream.push_back({points[t], 1.0, t + 1});
        const auto decay = DecayFunction::exponential(h);
        const double cost = oracle::exact_decayed_cost(stream, decay, stream.size(), cfg.cost, result.centers);
        const auto opt = oracle::exhaustive_kmedian(oracle::decayed_points(stream, decay, stream.size()), cfg.cost, 2);
        const double ratio = opt.opt_cost > 0.0 ? cost / opt.opt_cost : (cost > 0.0 ? INFINITY : 1.0);
        within += ratio <= bound;
        worst = std::max(worst, ratio);
    }
    const double secs = seconds_since(t0);
    const bool pass = within >= 18 && secs < 120.0;
    return {pass, fmt("%d/20 within BOUND(2,10,ALPHA=%g) = %.1f (alpha=3 value: %.1f); worst ratio %.3f; %.1fs",
                      within, kAlpha, bound, approximation_bound(2.0, 10.0, 3.0), worst, secs)};
}

Outcome criterion6() {
    // Hard assertion after every element, across several configurations.
    std::size_t elements = 0;
    for (double h : {2.0, 4.0, 8.0}) {
        for (std::size_t k : {1u, 2u, 4u}) {
            StreamConfig cfg;
            cfg.k = k;
            cfg.h = h;
            cfg.delta_aspect = 1024.0;
            harness::StreamShape shape;
            shape.length = 3000;
            shape.dim = 2;
            shape.side = std::floor(1024.0 / std::sqrt(2.0));
            shape.integer_coords = true;
            for (const harness::Generator& g :
                 {harness::Generator{harness::GaussianClusters{5, 30.0, 0.05}}, harness::Generator{harness::UniformBox{}},
                  harness::Generator{harness::Adversarial{harness::AdversarialKind::Alternating}}}) {
                ExpDecayClusterer c(cfg, k * 100 + static_cast<std::uint64_t>(h));
                for (const auto& p : harness::generate_stream(g, shape, 7)) {
                    try {
                        c.push(p);
                    } catch (const std::logic_error& e) {
                        return {false, e.what()};
                    }
                    ++elements;
                    if (static_cast<double>(c.stored_points()) > cfg.space_bound()) {
                        return {false, fmt("stored %zu > bound %.1f", c.stored_points(), cfg.space_bound())};
                    }
                }
            }
        }
    }

    std::vector<std::pair<double, double>> rows;
    std::string per_delta;
    for (int e = 4; e <= 10; ++e) {
        const double delta = std::exp2(e);
        StreamConfig cfg;
        cfg.k = 2;
        cfg.h = 4.0;
        cfg.delta_aspect = delta;
        cfg.amplification = 1;
        harness::StreamShape shape;
        shape.length = 3000;
        shape.dim = 1;
        shape.side = delta;
        shape.integer_coords = true;
        double mean = 0.0;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            ExpDecayClusterer c(cfg, seed);
            for (const auto& p : harness::generate_stream(harness::UniformBox{}, shape, 300 + seed)) c.push(p);
            rows.emplace_back(delta, static_cast<double>(c.peak_stored()));
            mean += static_cast<double>(c.peak_stored()) / 5.0;
        }
        per_delta += fmt("%s%g", per_delta.empty() ? "" : "/", mean);
    }
    const auto curve = harness::fit_space_curve(rows);
    const bool pass = curve.growth_vs_log <= 2.0;
    return {pass, fmt("%zu elements within bound; peak stored for Delta=2^4..2^10: %s; growth vs log2 Delta %.2f (limit 2)",
                      elements, per_delta.c_str(), curve.growth_vs_log)};
}

Outcome criterion7() {
    StreamConfig cfg;
    cfg.k = 2;
    cfg.h = 2.0;
    cfg.delta_aspect = 64.0;
    Rng gen(77);
    std::vector<Point> points;
    std::vector<WeightedPoint> weighted;
    for (std::uint64_t t = 1; t <= 100; ++t) {
        const double c = uniform01(gen) < 0.5 ? 12.0 : 50.0;
        const Point p{std::round(c + (uniform01(gen) - 0.5) * 10.0)};
        points.push_back(p);
        weighted.push_back({p, std::exp2(static_cast<double>(t) / cfg.h), t});
    }
    const double opt = oracle::exhaustive_kmedian(weighted, cfg.cost, cfg.k).opt_cost;
    const double L = 2.0 * opt;
    const double cost_limit = 6.0 * opt + 2.0 * L;
    const double facility_limit = (2.0 + 6.0 * opt / L) * static_cast<double>(cfg.k) * (1.0 + cfg.log2_w());

    int cost_ok = 0;
    int facilities_ok = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto ps = PhaseState::initial(cfg, seed);
        start_phase(ps, std::log2(L));
        for (std::uint64_t t = 1; t <= points.size(); ++t) ofl_step(ps, points[t - 1], t);
        cost_ok += std::exp2(ps.log_running_cost) <= cost_limit;
        facilities_ok += static_cast<double>(ps.facilities.size()) <= facility_limit;
    }
    const bool pass = cost_ok >= 100 && facilities_ok >= 100;
    return {pass, fmt("service cost <= 6 OPT + 2L in %d/200; facilities <= %.1f in %d/200", cost_ok, facility_limit,
                      facilities_ok)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome criterion8() {
    const fs::path dir = fs::temp_directory_path() / ("decaystream-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = DECAYSTREAM_CLI_PATH;

    harness::StreamShape shape;
    shape.length = 1500;
    shape.dim = 2;
    shape.side = 700.0;
    shape.integer_coords = true;
    {
        std::ofstream out(dir / "input.csv");
        for (const auto& p : harness::generate_stream(harness::GaussianClusters{3, 20.0, 0.0}, shape, 3)) {
            out << p.coords[0] << ',' << p.coords[1] << '\n';
        }
    }
    const std::string in = (dir / "input.csv").string();
    const std::string coreset = (dir / "coreset.jsonl").string();
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"poly", "poly --s 1 --k 2 --seed 5 --input " + in},
        {"exp", "exp --h 8 --k 2 --seed 5 --input " + in},
        {"verify", "verify --coreset " + coreset + " --s 1 --k 2 --seed 5 --input " + in},
        {"bench-poly", "bench --algo poly --s 1 --length 500 --seeds 1,2,3 --no-timing"},
        {"bench-exp", "bench --algo exp --h 4 --length 300 --seeds 1,2,3 --no-timing"},
    };
    if (std::system((cli + " poly --s 1 --k 2 --seed 5 --input " + in + " --output " + coreset).c_str()) != 0) {
        return {false, "could not produce the coreset for verify"};
    }
    std::string compared;
    bool pass = true;
    for (const auto& [name, args] : commands) {
        std::string outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / (name + std::to_string(rep) + ".out");
            const int rc = std::system((cli + " " + args + " > " + out.string()).c_str());
            if (rc != 0) {
                pass = false;
                compared += " " + name + "(exit " + std::to_string(rc) + ")";
            }
            outputs[rep] = slurp(out);
        }
        const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
        pass = pass && same;
        compared += " " + name + (same ? " same (" + std::to_string(outputs[0].size()) + " bytes)" : " differs");
    }
    fs::remove_all(dir);
    return {pass, "byte-identical reruns:" + compared};
}

void report(int id, const Outcome& o, int& failures) {
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
    failures += !o.pass;
}

}  // namespace

int main() {
    int failures = 0;
    const PolyRun poly = run_poly_streams();
    report(1,
           {poly.passes >= 19 && poly.seconds < 60.0,
            fmt("%d/20 streams pass verify_coreset at eps=0.3; worst max_rel_error %.3f; %.1fs", poly.passes,
                poly.worst_error, poly.seconds)},
           failures);
    report(2,
           {poly.blocks_ok,
            fmt("block count within bound at every prefix; max blocks %zu; min slack %.2f", poly.worst_blocks,
                poly.worst_block_slack)},
           failures);
    report(3, criterion3(), failures);
    report(4, criterion4(), failures);
    report(5, criterion5(), failures);
    report(6, criterion6(), failures);
    report(7, criterion7(), failures);
    report(8, criterion8(), failures);
    return failures == 0 ? 0 : 1;
}
