#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "decaystream/harness.hpp"

using namespace decaystream;
using namespace decaystream::harness;

namespace {

Experiment poly_experiment(std::uint64_t length, std::vector<std::uint64_t> seeds) {
    Experiment e;
    e.generator = GaussianClusters{3, 2.0, 0.0};
    e.shape.length = length;
    PolyDecayConfig cfg;
    cfg.s = 1.0;
    cfg.epsilon = 0.3;
    cfg.k = 2;
    e.algo = cfg;
    e.seeds = std::move(seeds);
    e.timing = false;
    return e;
}

Experiment exp_experiment(std::uint64_t length, std::vector<std::uint64_t> seeds) {
    Experiment e;
    e.generator = GaussianClusters{2, 20.0, 0.0};
    e.shape.length = length;
    e.shape.dim = 1;
    e.shape.side = 1000.0;
    StreamConfig cfg;
    cfg.k = 2;
    cfg.h = 8.0;
    cfg.delta_aspect = 1024.0;
    e.algo = cfg;
    e.seeds = std::move(seeds);
    e.timing = false;
    return e;
}

std::string csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream os;
    write_metrics_csv(os, rows);
    return os.str();
}

}  // namespace

TEST_CASE("generators") {
    StreamShape shape;
    shape.length = 500;
    shape.dim = 3;
    shape.side = 50.0;
    for (const Generator& g : {Generator{GaussianClusters{4, 3.0, 0.01}}, Generator{UniformBox{}},
                               Generator{Adversarial{AdversarialKind::LateOutlier}},
                               Generator{Adversarial{AdversarialKind::Alternating}}}) {
        const auto pts = generate_stream(g, shape, 9);
        REQUIRE(pts.size() == 500);
        for (const auto& p : pts) {
            REQUIRE(p.dim() == 3);
            for (double x : p.coords) {
                CHECK(x >= 0.0);
                CHECK(x <= 50.0);
            }
        }
        CHECK(generate_stream(g, shape, 9) == pts);
        CHECK(generate_stream(g, shape, 10) != pts);
    }
    shape.integer_coords = true;
    for (const auto& p : generate_stream(UniformBox{}, shape, 1)) {
        for (double x : p.coords) CHECK(x == std::round(x));
    }
    const auto late = generate_stream(Adversarial{AdversarialKind::LateOutlier}, shape, 1);
    CHECK(late.front().coords[0] < 5.0);
    CHECK(late.back().coords[0] > 45.0);

    shape.dim = 0;
    CHECK_THROWS_AS(generate_stream(UniformBox{}, shape, 1), std::invalid_argument);
}

TEST_CASE("one row per seed, in seed order") {
    auto e = poly_experiment(300, {1, 2, 3});
    const auto rows = run_experiment(e);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rows[i].seed == i + 1);
        CHECK(rows[i].n == 300);
        CHECK(rows[i].error.empty());
        CHECK(rows[i].block_count.has_value());
        CHECK(!rows[i].phase_count.has_value());
        CHECK(!rows[i].update_ns.has_value());
        CHECK(rows[i].stored_points >= 2);
        CHECK(rows[i].ratio.has_value() == rows[i].oracle_opt.has_value());
    }
    e.seeds = {};
    CHECK_THROWS_AS(run_experiment(e), std::invalid_argument);
}

TEST_CASE("rows are independent of seed order and worker count") {
    auto e = exp_experiment(200, {5, 6, 7, 8});
    e.workers = 1;
    const auto a = run_experiment(e);
    e.workers = 4;
    e.seeds = {8, 7, 6, 5};
    const auto b = run_experiment(e);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& x = a[i];
        const auto& y = b[3 - i];
        CHECK(x.seed == y.seed);
        CHECK(x.final_cost == y.final_cost);
        CHECK(x.stored_points == y.stored_points);
        CHECK(x.phase_count == y.phase_count);
    }
    e.seeds = {5, 6, 7, 8};
    CHECK(csv(run_experiment(e)) == csv(a));
}

TEST_CASE("poly experiment: block count under the bound") {
    auto e = poly_experiment(2000, {1, 2, 3});
    e.oracle = false;
    for (const auto& r : run_experiment(e)) {
        CHECK(r.error.empty());
        CHECK(static_cast<double>(*r.block_count) <= block_count_bound(1.0, 0.3, r.n));
        CHECK(!r.oracle_opt.has_value());
    }
}

TEST_CASE("exp experiment: ratio under the bound, oracle revalidates") {
    auto e = exp_experiment(300, {1, 2, 3, 4});
    for (const auto& r : run_experiment(e)) {
        CHECK(r.error.empty());
        REQUIRE(r.ratio.has_value());
        CHECK(*r.ratio <= approximation_bound(2.0, 10.0, kAlpha));
        CHECK(r.phase_count.has_value());
    }
}

TEST_CASE("oracle budget violations land in the row") {
    auto e = poly_experiment(1500, {1});
    std::get<PolyDecayConfig>(e.algo).k = 3;
    const auto rows = run_experiment(e);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].error.find("budget") != std::string::npos);
    CHECK(!rows[0].ratio.has_value());
    CHECK(rows[0].final_cost > 0.0);

    // An exp stream that breaks the aspect-ratio bound fails per row too.
    auto bad = exp_experiment(100, {1, 2});
    bad.shape.side = 5000.0;
    bad.generator = Adversarial{AdversarialKind::Alternating};
    for (const auto& r : run_experiment(bad)) CHECK(r.error.find("aspect ratio") != std::string::npos);
}

TEST_CASE("timing fills update_ns") {
    auto e = poly_experiment(100, {1});
    e.timing = true;
    const auto rows = run_experiment(e);
    REQUIRE(rows[0].update_ns.has_value());
    CHECK(*rows[0].update_ns > 0.0);
}

TEST_CASE("metrics CSV") {
    auto e = exp_experiment(50, {3});
    const auto rows = run_experiment(e);
    const auto text = csv(rows);
    CHECK(text.rfind(csv_header() + "\n", 0) == 0);
    CHECK(csv_header() == "seed,n,stored_points,update_ns,final_cost,oracle_opt,ratio,phase_count,block_count,error");
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);

    MetricsRow odd;
    odd.error = "a, \"quoted\" failure";
    std::ostringstream os;
    write_metrics_csv(os, std::vector<MetricsRow>{odd});
    CHECK(os.str().find("\"a, \"\"quoted\"\" failure\"") != std::string::npos);
}

TEST_CASE("fit_space_curve") {
    const std::vector<std::pair<double, double>> flat{{10, 5}, {100, 5}, {1000, 5}, {10000, 5}};
    const auto f = fit_space_curve(flat);
    CHECK(f.slope == doctest::Approx(0.0));
    CHECK(f.residual == doctest::Approx(0.0));
    CHECK(f.sizes == 4);
    CHECK(f.growth_vs_log <= 1.0);

    std::vector<std::pair<double, double>> logs;
    for (double n : {16.0, 64.0, 256.0, 1024.0}) {
        logs.emplace_back(n, 3.0 * std::log(n));
        logs.emplace_back(n, 3.0 * std::log(n));  // duplicates are averaged
    }
    const auto l = fit_space_curve(logs);
    CHECK(l.slope == doctest::Approx(3.0));
    CHECK(l.intercept == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(l.growth_vs_log == doctest::Approx(1.0));
    CHECK(l.sizes == 4);

    const std::vector<std::pair<double, double>> linear{{10, 10}, {100, 100}, {1000, 1000}, {10000, 10000}};
    CHECK(fit_space_curve(linear).growth_vs_log > 100.0);

    const std::vector<std::pair<double, double>> few{{10, 1}, {100, 1}, {1000, 1}, {1000, 2}};
    CHECK_THROWS_AS(fit_space_curve(few), std::invalid_argument);
    const std::vector<std::pair<double, double>> tiny{{1, 1}, {10, 1}, {100, 1}, {1000, 1}};
    CHECK_THROWS_AS(fit_space_curve(tiny), std::invalid_argument);
}

TEST_CASE("poly space grows sub-linearly in log n") {
    std::vector<std::pair<double, double>> pts;
    for (std::uint64_t n : {250u, 500u, 1000u, 2000u}) {
        auto e = poly_experiment(n, {1, 2});
        e.oracle = false;
        for (const auto& r : run_experiment(e)) pts.emplace_back(double(n), double(r.stored_points));
    }
    const auto rep = fit_space_curve(pts);
    CHECK(rep.slope > 0.0);
    CHECK(rep.growth_vs_log <= 2.0);
}
