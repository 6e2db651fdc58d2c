#ifndef CSQFC_IO_HPP
#define CSQFC_IO_HPP

// Text formats read by the scenario runner. Row-oriented files are
// comma-separated with optional `#` comments; parse errors carry the 1-based
// line number.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "csqfc/fit.hpp"
#include "csqfc/pump_bank.hpp"
#include "csqfc/scheduler.hpp"
#include "csqfc/spectral.hpp"

namespace csqfc {

// Splits a CSV-ish text into rows of trimmed fields, skipping blank lines and
// comments. Each row remembers its source line.
struct CsvRow {
    int line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRow> parse_rows(std::string_view text);

// `pump_channel, pump_power_mw, efficiency, std_err`; one curve per channel.
// A leading header row whose first field is not numeric is skipped.
std::map<int, EfficiencyCurve> parse_calibration(std::string_view text);

// `time_us, target_channel`.
std::vector<SwitchEvent> parse_switch_events(std::string_view text);

// `party_a, party_b, demand`.
std::vector<PartyLinkRequest> parse_requests(std::string_view text);

// Device config document with keys length_mm, pm_pump_ghz,
// beta_rad_per_mm_ghz and channels[{index, a, b_per_mw}].
ConversionDevice parse_device_json(std::string_view json_text);

std::string read_file(const std::string& path);

}  // namespace csqfc

#endif
