#ifndef CSQFC_SCENARIO_HPP
#define CSQFC_SCENARIO_HPP

// Scenario runner behind the command-line tool. A scenario is one JSON config
// file with a `kind` discriminator; running it writes plot-ready CSV files and
// a manifest into the output directory.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csqfc/photon_stats.hpp"

namespace csqfc {

enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    infeasible = 3,
    io_error = 4,
};

inline constexpr std::string_view kVersion = "csqfc 0.1.0";

// Kinds understood by run().
const std::vector<std::string>& scenario_kinds();

struct Scenario {
    std::string kind;
    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;  // overrides the config's thread count
};

struct RunResult {
    ExitCode code = ExitCode::ok;
    std::string message;
    std::vector<std::string> outputs;  // file names relative to output_dir
};

RunResult run(const Scenario& scenario);

// Builds the Monte Carlo scenario from the JSON text of a coincidence or
// matrix config. Relative file references resolve against `base_dir`.
ConversionScenario parse_conversion_scenario(std::string_view json_text, const std::string& base_dir = ".");

// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace csqfc

#endif
