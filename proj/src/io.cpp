#include "decaystream/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace decaystream::io {
namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<double> parse_csv_row(std::string_view row, std::uint64_t line) {
    std::vector<double> coords;
    while (true) {
        const auto comma = row.find(',');
        const std::string_view field = trim(row.substr(0, comma));
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
            throw IngestError(line, "malformed coordinate '" + std::string(field) + "'");
        }
        if (!std::isfinite(value)) throw IngestError(line, "non-finite coordinate");
        coords.push_back(value);
        if (comma == std::string_view::npos) break;
        row.remove_prefix(comma + 1);
    }
    return coords;
}

std::vector<double> parse_coords(const json& obj, std::uint64_t line) {
    if (!obj.is_object() || !obj.contains("coords") || !obj["coords"].is_array()) {
        throw IngestError(line, "expected an object with a \"coords\" array");
    }
    std::vector<double> coords;
    for (const auto& v : obj["coords"]) {
        if (!v.is_number()) throw IngestError(line, "non-numeric coordinate");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw IngestError(line, "non-finite coordinate");
        coords.push_back(x);
    }
    if (coords.empty()) throw IngestError(line, "empty coords array");
    return coords;
}

json parse_json_line(const std::string& text, std::uint64_t line) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IngestError(line, std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

InputFormat parse_format(const std::string& name) {
    if (name == "csv") return InputFormat::Csv;
    if (name == "jsonl") return InputFormat::Jsonl;
    throw std::invalid_argument("unknown input format '" + name + "' (expected csv or jsonl)");
}

IngestError::IngestError(std::uint64_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

PointReader::PointReader(std::istream& in, InputFormat format) : in_(in), format_(format) {}

std::optional<Point> PointReader::next() {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (trim(text).empty()) continue;
        std::vector<double> coords = format_ == InputFormat::Csv
                                         ? parse_csv_row(trim(text), line_)
                                         : parse_coords(parse_json_line(text, line_), line_);
        if (count_ == 0) {
            dim_ = coords.size();
        } else if (coords.size() != dim_) {
            throw IngestError(line_, "dimension changed from " + std::to_string(dim_) + " to " +
                                         std::to_string(coords.size()));
        }
        ++count_;
        return Point(std::move(coords));
    }
    return std::nullopt;
}

std::vector<Point> read_points(std::istream& in, InputFormat format) {
    PointReader reader(in, format);
    std::vector<Point> out;
    while (auto p = reader.next()) out.push_back(std::move(*p));
    return out;
}

std::vector<WeightedPoint> as_stream(const std::vector<Point>& points) {
    std::vector<WeightedPoint> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out.push_back({points[i], 1.0, i + 1});
    return out;
}

void write_weighted_jsonl(std::ostream& out, const std::vector<WeightedPoint>& points) {
    for (const auto& wp : points) {
        json row;
        row["coords"] = wp.point.coords;
        row["index"] = wp.arrival_index;
        row["weight"] = wp.weight;
        out << row.dump() << '\n';
    }
}

std::vector<WeightedPoint> read_weighted_jsonl(std::istream& in) {
    std::vector<WeightedPoint> out;
    std::string text;
    std::uint64_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (trim(text).empty()) continue;
        const json row = parse_json_line(text, line);
        WeightedPoint wp;
        wp.point = Point(parse_coords(row, line));
        if (!row.contains("weight") || !row["weight"].is_number()) {
            throw IngestError(line, "missing numeric \"weight\"");
        }
        wp.weight = row["weight"].get<double>();
        if (!(wp.weight >= 0.0)) throw IngestError(line, "negative weight");
        wp.arrival_index = row.value("index", static_cast<std::uint64_t>(out.size() + 1));
        if (!out.empty() && wp.point.dim() != out.front().point.dim()) {
            throw IngestError(line, "dimension change");
        }
        out.push_back(std::move(wp));
    }
    return out;
}

}  // namespace decaystream::io
