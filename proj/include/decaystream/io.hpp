#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaystream/core.hpp"
#include "decaystream/offline.hpp"

namespace decaystream::io {

enum class InputFormat { Csv, Jsonl };

InputFormat parse_format(const std::string& name);

// Malformed input; the message names the 1-based line number.
class IngestError : public std::runtime_error {
public:
    IngestError(std::uint64_t line, const std::string& what);
    std::uint64_t line() const { return line_; }

private:
    std::uint64_t line_;
};

// Streaming point reader. Row order is arrival order; blank lines are skipped.
//   csv:   "x1,x2,...,xd"
//   jsonl: {"coords": [x1, ..., xd]}
class PointReader {
public:
    PointReader(std::istream& in, InputFormat format);

    std::optional<Point> next();
    // Arrival index of the last returned point.
    std::uint64_t count() const { return count_; }

private:
    std::istream& in_;
    InputFormat format_;
    std::uint64_t line_ = 0;
    std::uint64_t count_ = 0;
    std::size_t dim_ = 0;
};

std::vector<Point> read_points(std::istream& in, InputFormat format);

// Points with arrival indices 1..n and unit weight.
std::vector<WeightedPoint> as_stream(const std::vector<Point>& points);

// One JSON object per line: {"coords": [...], "index": t, "weight": w}.
void write_weighted_jsonl(std::ostream& out, const std::vector<WeightedPoint>& points);
std::vector<WeightedPoint> read_weighted_jsonl(std::istream& in);

}  // namespace decaystream::io
