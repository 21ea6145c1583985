#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "decaystream/expdecay.hpp"
#include "decaystream/oracle.hpp"
#include "decaystream/polydecay.hpp"

namespace py = pybind11;
using namespace decaystream;

namespace {

std::vector<Point> to_points(const std::vector<std::vector<double>>& rows) {
    std::vector<Point> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.emplace_back(r);
    return out;
}

// Unit-weight stream with arrival indices 1..n.
std::vector<WeightedPoint> to_stream(const std::vector<std::vector<double>>& rows) {
    std::vector<WeightedPoint> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out.push_back({Point(rows[i]), 1.0, i + 1});
    return out;
}

// (coords, weight, index) triples back to weighted points.
std::vector<WeightedPoint> to_weighted(const std::vector<std::tuple<std::vector<double>, double, std::uint64_t>>& rows) {
    std::vector<WeightedPoint> out;
    out.reserve(rows.size());
    for (const auto& [c, w, t] : rows) out.push_back({Point(c), w, t});
    return out;
}

py::list from_weighted(const std::vector<WeightedPoint>& pts) {
    py::list out;
    for (const auto& p : pts) out.append(py::make_tuple(p.point.coords, p.weight, p.arrival_index));
    return out;
}

py::list from_points(const std::vector<Point>& pts) {
    py::list out;
    for (const auto& p : pts) out.append(p.coords);
    return out;
}

}  // namespace

PYBIND11_MODULE(_decaystream, m) {
    m.doc() = "Clustering summaries for time-decayed data streams";
    m.attr("ALPHA") = kAlpha;

    m.def("compute_marker", &compute_marker, py::arg("s"), py::arg("epsilon"), py::arg("level"));
    m.def("block_weight", &block_weight, py::arg("a_age"), py::arg("b_age"), py::arg("s"), py::arg("epsilon"));
    m.def("block_count_bound", &block_count_bound, py::arg("s"), py::arg("epsilon"), py::arg("n"));
    m.def("approximation_bound", &approximation_bound, py::arg("beta"), py::arg("gamma"),
          py::arg("alpha") = kAlpha);

    py::class_<PolyDecaySketch>(m, "PolyDecaySketch")
        .def(py::init([](double s, double epsilon, std::size_t k, const std::string& cost, std::uint64_t n_max,
                         std::uint64_t seed) {
                 PolyDecayConfig cfg;
                 cfg.s = s;
                 cfg.epsilon = epsilon;
                 cfg.k = k;
                 cfg.cost = parse_cost_function(cost);
                 cfg.n_max = n_max;
                 cfg.rng_seed = seed;
                 return PolyDecaySketch(cfg);
             }),
             py::arg("s"), py::arg("epsilon") = 0.3, py::arg("k") = 2, py::arg("cost") = "kmedian",
             py::arg("n_max") = std::uint64_t{1} << 30, py::arg("seed") = 0)
        .def("insert", [](PolyDecaySketch& sk, const std::vector<double>& p) { sk.insert(Point(p)); })
        .def("extend",
             [](PolyDecaySketch& sk, const std::vector<std::vector<double>>& rows) {
                 for (const auto& r : rows) sk.insert(Point(r));
             })
        .def("query", [](const PolyDecaySketch& sk) { return from_weighted(sk.query().entries); },
             "Decay-weighted coreset as (coords, weight, arrival_index) tuples.")
        .def("blocks",
             [](const PolyDecaySketch& sk) {
                 py::list out;
                 for (const auto& b : sk.blocks()) out.append(py::make_tuple(b.a, b.b));
                 return out;
             })
        .def_property_readonly("size", &PolyDecaySketch::size)
        .def_property_readonly("stored_points", &PolyDecaySketch::stored_points)
        .def_property_readonly("block_count", &PolyDecaySketch::block_count);

    m.def(
        "cluster_exponential",
        [](const std::vector<std::vector<double>>& rows, std::size_t k, double h, double delta_aspect, double beta,
           double gamma, double delta, std::size_t amplification, const std::string& cost, std::uint64_t seed) {
            StreamConfig cfg;
            cfg.k = k;
            cfg.h = h;
            cfg.delta_aspect = delta_aspect;
            cfg.beta = beta;
            cfg.gamma = gamma;
            cfg.delta = delta;
            cfg.amplification = amplification;
            cfg.cost = parse_cost_function(cost);
            cfg.rng_seed = seed;
            const auto points = to_points(rows);
            const auto r = process_stream(cfg, points);
            py::dict out;
            out["centers"] = from_points(r.centers);
            out["log2_cost"] = r.log2_cost_estimate;
            out["phase_count"] = r.phase_count;
            out["peak_stored"] = r.peak_stored;
            out["instance"] = r.instance;
            return out;
        },
        py::arg("points"), py::arg("k") = 2, py::arg("h") = 8.0, py::arg("delta_aspect") = 1024.0,
        py::arg("beta") = 2.0, py::arg("gamma") = 10.0, py::arg("delta") = 0.05, py::arg("amplification") = 0,
        py::arg("cost") = "kmedian", py::arg("seed") = 0);

    m.def(
        "decayed_cost",
        [](const std::vector<std::vector<double>>& rows, const std::vector<std::vector<double>>& centers,
           std::optional<double> s, std::optional<double> h, const std::string& cost) {
            if (s.has_value() == h.has_value()) throw py::value_error("pass exactly one of s or h");
            const auto decay = s ? DecayFunction::polynomial(*s) : DecayFunction::exponential(*h);
            const auto stream = to_stream(rows);
            return oracle::exact_decayed_cost(stream, decay, stream.size(), parse_cost_function(cost),
                                              to_points(centers));
        },
        py::arg("points"), py::arg("centers"), py::arg("s") = py::none(), py::arg("h") = py::none(),
        py::arg("cost") = "kmedian",
        "Exact decayed cost at the end of the stream; exponential costs are relative to the newest arrival.");

    m.def(
        "exhaustive_kmedian",
        [](const std::vector<std::tuple<std::vector<double>, double, std::uint64_t>>& rows, std::size_t k,
           const std::string& cost) {
            const auto r = oracle::exhaustive_kmedian(to_weighted(rows), parse_cost_function(cost), k);
            return py::make_tuple(from_points(r.centers), r.opt_cost);
        },
        py::arg("points"), py::arg("k"), py::arg("cost") = "kmedian");

    m.def(
        "verify_coreset",
        [](const std::vector<std::tuple<std::vector<double>, double, std::uint64_t>>& coreset,
           const std::vector<std::vector<double>>& rows, std::size_t k, double epsilon, std::optional<double> s,
           std::optional<double> h, std::size_t grid_count, const std::string& cost, std::uint64_t seed) {
            if (s.has_value() == h.has_value()) throw py::value_error("pass exactly one of s or h");
            const auto decay = s ? DecayFunction::polynomial(*s) : DecayFunction::exponential(*h);
            const auto stream = to_stream(rows);
            const auto reference = oracle::decayed_points(stream, decay, stream.size());
            const auto grid = oracle::sampled_subsets_grid(stream, k, grid_count, seed);
            const auto rep =
                oracle::verify_coreset(to_weighted(coreset), reference, parse_cost_function(cost), grid, epsilon);
            py::dict out;
            out["pass"] = rep.pass;
            out["max_rel_error"] = rep.max_rel_error;
            out["candidates"] = rep.candidates;
            out["failures"] = rep.failures;
            return out;
        },
        py::arg("coreset"), py::arg("points"), py::arg("k"), py::arg("epsilon"), py::arg("s") = py::none(),
        py::arg("h") = py::none(), py::arg("grid_count") = 100, py::arg("cost") = "kmedian", py::arg("seed") = 0);

    py::register_exception<std::length_error>(m, "LimitError", PyExc_ValueError);
}
