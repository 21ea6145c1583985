#include "decaystream/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "decaystream/harness.hpp"
#include "decaystream/oracle.hpp"

namespace decaystream::cli {
namespace {

using json = nlohmann::json;

std::uint64_t parse_seed_env(const char* text) {
    std::uint64_t value = 0;
    const std::string_view sv(text);
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (sv.empty() || ec != std::errc{} || ptr != sv.data() + sv.size()) {
        throw UsageError("DECAYSTREAM_SEED must be a nonnegative integer, got '" + std::string(sv) + "'");
    }
    return value;
}

void add_io(CLI::App* sub, CliConfig& cfg, std::string& format) {
    sub->add_option("--input,-i", cfg.input, "Input stream path, '-' for stdin");
    sub->add_option("--format", format, "Input format: csv or jsonl");
    sub->add_option("--output,-o", cfg.output, "Output path, '-' for stdout");
}

void add_common(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--k", cfg.k, "Number of centers");
    sub->add_option("--seed", cfg.seed, "RNG seed (DECAYSTREAM_SEED overrides)");
    sub->add_option("--cost", cfg.cost, "Cost function: kmedian, kmeans or huber");
    sub->add_option("--huber-threshold", cfg.huber_threshold, "Huber threshold");
}

void add_poly(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--s", cfg.s, "Polynomial decay exponent");
    sub->add_option("--epsilon", cfg.epsilon, "Coreset accuracy in (0, 1)");
    sub->add_option("--n-max", cfg.n_max, "Upper bound on the stream length");
}

void add_exp(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--h", cfg.h, "Half-life of the exponential decay");
    sub->add_option("--delta-aspect", cfg.delta_aspect, "Upper bound on the stream's aspect ratio");
    sub->add_option("--beta", cfg.beta, "Guess growth factor, in (1, 2]");
    sub->add_option("--gamma", cfg.gamma, "Phase threshold factor, >= 9");
    sub->add_option("--delta", cfg.delta, "Failure probability for amplification");
    sub->add_option("--amplification", cfg.amplification, "Parallel instances (0: ceil(log2(1/delta)))");
}

void validate(CliConfig& cfg, const std::string& format) {
    try {
        cfg.format = io::parse_format(format);
        (void)parse_cost_function(cfg.cost, cfg.huber_threshold);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (cfg.k == 0) throw UsageError("--k must be positive");

    auto needs_poly = [&] {
        if (!cfg.s) throw UsageError("--s is required");
        if (!(*cfg.s >= 0.0)) throw UsageError("--s must be nonnegative");
        if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
        if (cfg.n_max < 2) throw UsageError("--n-max must be at least 2");
    };
    auto needs_exp = [&] {
        if (!cfg.h) throw UsageError("--h is required");
        try {
            cfg.stream_config().validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    };

    switch (cfg.subcommand) {
        case Subcommand::Poly:
            needs_poly();
            break;
        case Subcommand::Exp:
            needs_exp();
            break;
        case Subcommand::Verify:
            if (cfg.coreset.empty()) throw UsageError("--coreset is required");
            if (cfg.s.has_value() == cfg.h.has_value()) {
                throw UsageError("verify needs exactly one of --s (polynomial) or --h (exponential)");
            }
            if (cfg.s && !(*cfg.s > 0.0)) throw UsageError("--s must be positive");
            if (cfg.h && !(*cfg.h > 0.0)) throw UsageError("--h must be positive");
            if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
            if (cfg.grid_count == 0) throw UsageError("--grid-count must be positive");
            break;
        case Subcommand::Bench:
            if (cfg.algo == "poly") {
                if (cfg.h) throw UsageError("--h is not valid with --algo poly");
                needs_poly();
            } else if (cfg.algo == "exp") {
                if (cfg.s) throw UsageError("--s is not valid with --algo exp");
                needs_exp();
            } else {
                throw UsageError("--algo must be poly or exp");
            }
            if (cfg.generator != "gaussian" && cfg.generator != "uniform" && cfg.generator != "late-outlier" &&
                cfg.generator != "alternating") {
                throw UsageError("--generator must be gaussian, uniform, late-outlier or alternating");
            }
            if (cfg.length == 0) throw UsageError("--length must be positive");
            if (cfg.dim == 0) throw UsageError("--dim must be positive");
            if (cfg.side && !(*cfg.side > 0.0)) throw UsageError("--side must be positive");
            if (cfg.clusters == 0) throw UsageError("--clusters must be positive");
            if (cfg.seeds.empty()) cfg.seeds.push_back(cfg.seed);
            break;
    }
}

// Output sink: stdout for "-", otherwise a file opened up front.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) throw std::runtime_error("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

// Input source: stdin for "-", otherwise a file.
class Source {
public:
    explicit Source(const std::string& path) : stream_(&std::cin) {
        if (path != "-") {
            file_ = std::make_unique<std::ifstream>(path);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for reading");
            stream_ = file_.get();
        }
    }
    std::istream& get() { return *stream_; }

private:
    std::unique_ptr<std::ifstream> file_;
    std::istream* stream_;
};

int run_poly(const CliConfig& cfg, std::ostream& out) {
    Source src(cfg.input);
    Sink sink(cfg.output, out);
    PolyDecaySketch sketch(cfg.poly_config());
    io::PointReader reader(src.get(), cfg.format);
    while (auto p = reader.next()) sketch.insert(*p);
    io::write_weighted_jsonl(sink.get(), sketch.query().entries);
    sink.finish();
    return kExitOk;
}

int run_exp(const CliConfig& cfg, std::ostream& out) {
    Source src(cfg.input);
    Sink sink(cfg.output, out);
    AmplifiedClusterer clusterer(cfg.stream_config());
    io::PointReader reader(src.get(), cfg.format);
    bool any = false;
    while (auto p = reader.next()) {
        clusterer.push(*p);
        any = true;
    }
    if (!any) throw std::invalid_argument("empty stream");
    const ExpDecayResult result = clusterer.finish();
    json doc;
    doc["centers"] = json::array();
    for (const auto& c : result.centers) doc["centers"].push_back(c.coords);
    doc["log2_cost"] = result.log2_cost_estimate;
    doc["phase_count"] = result.phase_count;
    doc["peak_stored"] = result.peak_stored;
    doc["instance"] = result.instance;
    doc["n"] = clusterer.size();
    sink.get() << doc.dump() << '\n';
    sink.finish();
    return kExitOk;
}

int run_verify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<WeightedPoint> coreset;
    {
        std::ifstream in(cfg.coreset);
        if (!in) throw std::runtime_error("cannot open '" + cfg.coreset + "' for reading");
        coreset = io::read_weighted_jsonl(in);
    }
    Source src(cfg.input);
    const auto stream = io::as_stream(io::read_points(src.get(), cfg.format));
    if (stream.empty()) throw std::invalid_argument("empty stream");
    Sink sink(cfg.output, out);

    const DecayFunction decay = cfg.s ? DecayFunction::polynomial(*cfg.s) : DecayFunction::exponential(*cfg.h);
    const auto reference = oracle::decayed_points(stream, decay, stream.size());
    const auto grid = oracle::sampled_subsets_grid(stream, cfg.k, cfg.grid_count, cfg.seed);
    const auto cost = parse_cost_function(cfg.cost, cfg.huber_threshold);
    const auto report = oracle::verify_coreset(coreset, reference, cost, grid, cfg.epsilon);

    json doc;
    doc["candidates"] = report.candidates;
    doc["epsilon"] = cfg.epsilon;
    doc["failures"] = report.failures;
    doc["max_rel_error"] = report.max_rel_error;
    doc["pass"] = report.pass;
    sink.get() << doc.dump() << '\n';
    sink.finish();
    if (!report.pass) {
        err << "coreset verification failed: max_rel_error = " << report.max_rel_error << " > epsilon = " << cfg.epsilon
            << '\n';
        return kExitVerifyFailed;
    }
    return kExitOk;
}

int run_bench(const CliConfig& cfg, std::ostream& out) {
    harness::Experiment e;
    if (cfg.generator == "gaussian") {
        e.generator = harness::GaussianClusters{cfg.clusters, cfg.spread, cfg.drift};
    } else if (cfg.generator == "uniform") {
        e.generator = harness::UniformBox{};
    } else if (cfg.generator == "late-outlier") {
        e.generator = harness::Adversarial{harness::AdversarialKind::LateOutlier};
    } else {
        e.generator = harness::Adversarial{harness::AdversarialKind::Alternating};
    }
    e.shape.length = cfg.length;
    e.shape.dim = cfg.dim;
    if (cfg.algo == "poly") {
        e.algo = cfg.poly_config();
        e.shape.side = cfg.side.value_or(100.0);
    } else {
        e.algo = cfg.stream_config();
        // Largest box whose diameter stays within the aspect-ratio bound.
        e.shape.side = cfg.side.value_or(std::floor(cfg.delta_aspect / std::sqrt(static_cast<double>(cfg.dim))));
    }
    e.seeds = cfg.seeds;
    e.oracle = cfg.oracle;
    e.timing = cfg.timing;
    e.workers = cfg.workers;

    Sink sink(cfg.output, out);
    const auto rows = harness::run_experiment(e);
    harness::write_metrics_csv(sink.get(), rows);
    sink.finish();
    return kExitOk;
}

}  // namespace

PolyDecayConfig CliConfig::poly_config() const {
    PolyDecayConfig c;
    c.s = s.value_or(1.0);
    c.epsilon = epsilon;
    c.k = k;
    c.cost = parse_cost_function(cost, huber_threshold);
    c.n_max = n_max;
    c.rng_seed = seed;
    return c;
}

StreamConfig CliConfig::stream_config() const {
    StreamConfig c;
    c.k = k;
    c.h = h.value_or(8.0);
    c.delta_aspect = delta_aspect;
    c.beta = beta;
    c.gamma = gamma;
    c.delta = delta;
    c.amplification = amplification;
    c.rng_seed = seed;
    c.cost = parse_cost_function(cost, huber_threshold);
    return c;
}

CliConfig parse_args(int argc, const char* const* argv) {
    CliConfig cfg;
    std::string format = "csv";

    CLI::App app{"Clustering summaries for time-decayed data streams", "decaystream"};
    // -h would clash with the half-life option --h.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    auto* poly = app.add_subcommand("poly", "Maintain a coreset under polynomial decay; emits weighted JSONL");
    add_io(poly, cfg, format);
    add_common(poly, cfg);
    add_poly(poly, cfg);

    auto* exp = app.add_subcommand("exp", "k-median under exponential decay; emits centers as JSON");
    add_io(exp, cfg, format);
    add_common(exp, cfg);
    add_exp(exp, cfg);

    auto* verify = app.add_subcommand("verify", "Check a weighted coreset against the exact decayed stream");
    add_io(verify, cfg, format);
    add_common(verify, cfg);
    verify->add_option("--coreset", cfg.coreset, "Weighted JSONL coreset to check")->required();
    verify->add_option("--s", cfg.s, "Polynomial decay exponent");
    verify->add_option("--h", cfg.h, "Exponential half-life");
    verify->add_option("--epsilon", cfg.epsilon, "Accuracy to check");
    verify->add_option("--grid-count", cfg.grid_count, "Sampled k-subset queries");

    auto* bench = app.add_subcommand("bench", "Run a synthetic experiment; emits metrics CSV");
    bench->add_option("--output,-o", cfg.output, "Metrics CSV path, '-' for stdout");
    add_common(bench, cfg);
    add_poly(bench, cfg);
    add_exp(bench, cfg);
    bench->add_option("--algo", cfg.algo, "poly or exp");
    bench->add_option("--generator", cfg.generator, "gaussian, uniform, late-outlier or alternating");
    bench->add_option("--length", cfg.length, "Stream length");
    bench->add_option("--dim", cfg.dim, "Dimension");
    bench->add_option("--side", cfg.side, "Side of the coordinate box");
    bench->add_option("--clusters", cfg.clusters, "Gaussian clusters");
    bench->add_option("--spread", cfg.spread, "Gaussian standard deviation");
    bench->add_option("--drift", cfg.drift, "Cluster drift per arrival");
    bench->add_option("--seeds", cfg.seeds, "Comma-separated seeds")->delimiter(',');
    bench->add_flag("!--no-timing", cfg.timing, "Skip per-update timing (deterministic output)");
    bench->add_flag("!--no-oracle", cfg.oracle, "Skip oracle checks");
    bench->add_option("--workers", cfg.workers, "Worker threads (0: hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        cfg.show_help = true;
        cfg.help_text = app.help();
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    if (poly->parsed()) {
        cfg.subcommand = Subcommand::Poly;
    } else if (exp->parsed()) {
        cfg.subcommand = Subcommand::Exp;
    } else if (verify->parsed()) {
        cfg.subcommand = Subcommand::Verify;
    } else {
        cfg.subcommand = Subcommand::Bench;
    }
    for (auto* sub : app.get_subcommands()) {
        if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
            cfg.show_help = true;
            cfg.help_text = sub->help();
        }
    }
    if (const char* env = std::getenv("DECAYSTREAM_SEED")) cfg.seed = parse_seed_env(env);
    validate(cfg, format);
    return cfg;
}

int run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.show_help) {
        out << cfg.help_text;
        return kExitOk;
    }
    try {
        switch (cfg.subcommand) {
            case Subcommand::Poly:
                return run_poly(cfg, out);
            case Subcommand::Exp:
                return run_exp(cfg, out);
            case Subcommand::Verify:
                return run_verify(cfg, out, err);
            case Subcommand::Bench:
                return run_bench(cfg, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nRun 'decaystream --help' for usage.\n";
        return kExitUsage;
    }
    return run(cfg, out, err);
}

}  // namespace decaystream::cli
