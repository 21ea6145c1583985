#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaystream/expdecay.hpp"
#include "decaystream/io.hpp"
#include "decaystream/polydecay.hpp"

namespace decaystream::cli {

enum class Subcommand { Poly, Exp, Verify, Bench };

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerifyFailed = 2;
inline constexpr int kExitUsage = 64;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    Subcommand subcommand = Subcommand::Poly;
    std::string input = "-";
    io::InputFormat format = io::InputFormat::Csv;
    std::string output = "-";

    std::size_t k = 2;
    std::optional<double> s;
    std::optional<double> h;
    double epsilon = 0.3;
    double delta_aspect = 1024.0;
    double beta = 2.0;
    double gamma = 10.0;
    double delta = 0.05;
    std::uint64_t n_max = std::uint64_t{1} << 30;
    std::uint64_t seed = 0;
    std::string cost = "kmedian";
    double huber_threshold = 1.0;
    std::size_t amplification = 0;

    // verify
    std::string coreset;
    std::size_t grid_count = 100;

    // bench
    std::string algo = "poly";
    std::string generator = "gaussian";
    std::uint64_t length = 1000;
    std::size_t dim = 2;
    std::optional<double> side;
    std::size_t clusters = 3;
    double spread = 1.0;
    double drift = 0.0;
    std::vector<std::uint64_t> seeds;
    bool timing = true;
    bool oracle = true;
    std::size_t workers = 0;

    bool show_help = false;
    std::string help_text;

    PolyDecayConfig poly_config() const;
    StreamConfig stream_config() const;
};

// Parses and validates argv against every module precondition. The
// DECAYSTREAM_SEED environment variable, when set, overrides --seed. Throws
// UsageError on unknown flags, invalid values or invalid combinations.
CliConfig parse_args(int argc, const char* const* argv);

// Executes a parsed configuration. Results go to cfg.output ("-" is `out`),
// diagnostics to `err`. Returns one of the exit codes above.
int run(const CliConfig& cfg, std::ostream& out, std::ostream& err);

// parse_args + run with usage errors mapped to kExitUsage.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace decaystream::cli
