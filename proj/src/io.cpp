#include "csqfc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "csqfc/errors.hpp"
#include "json.hpp"

namespace csqfc {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& field, int line) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError("not a number: '" + field + "'", line);
    return v;
}

int to_int(const std::string& field, int line) {
    int v = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError("not an integer: '" + field + "'", line);
    return v;
}

bool looks_numeric(const std::string& field) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    return ec == std::errc{} && ptr == end;
}

std::vector<CsvRow> data_rows(std::string_view text, std::size_t columns) {
    auto rows = parse_rows(text);
    if (!rows.empty() && !rows.front().fields.empty() && !looks_numeric(rows.front().fields.front())) {
        rows.erase(rows.begin());
    }
    for (const auto& r : rows) {
        if (r.fields.size() != columns) {
            throw ConfigError("expected " + std::to_string(columns) + " fields, found " + std::to_string(r.fields.size()),
                              r.line);
        }
    }
    return rows;
}

}  // namespace

std::vector<CsvRow> parse_rows(std::string_view text) {
    std::vector<CsvRow> rows;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        if (!trim(line).empty()) {
            CsvRow row{line_no, {}};
            std::size_t start = 0;
            while (true) {
                const auto comma = line.find(',', start);
                row.fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                             : comma - start)));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            rows.push_back(std::move(row));
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return rows;
}

std::map<int, EfficiencyCurve> parse_calibration(std::string_view text) {
    std::map<int, std::vector<EfficiencySample>> grouped;
    std::map<int, int> first_line;
    for (const auto& r : data_rows(text, 4)) {
        const int ch = to_int(r.fields[0], r.line);
        EfficiencySample s{to_double(r.fields[1], r.line), to_double(r.fields[2], r.line), to_double(r.fields[3], r.line)};
        auto& v = grouped[ch];
        if (!v.empty() && !(s.pump_power_mw > v.back().pump_power_mw)) {
            throw ConfigError("pump powers for channel " + std::to_string(ch) + " must increase", r.line);
        }
        if (!(s.efficiency >= 0.0 && s.efficiency <= 1.0)) throw ConfigError("efficiency outside [0, 1]", r.line);
        if (s.pump_power_mw < 0.0) throw ConfigError("negative pump power", r.line);
        first_line.emplace(ch, r.line);
        v.push_back(s);
    }
    std::map<int, EfficiencyCurve> out;
    for (auto& [ch, v] : grouped) out.emplace(ch, EfficiencyCurve(std::move(v)));
    return out;
}

std::vector<SwitchEvent> parse_switch_events(std::string_view text) {
    std::vector<SwitchEvent> events;
    for (const auto& r : data_rows(text, 2)) {
        SwitchEvent e{to_double(r.fields[0], r.line), to_int(r.fields[1], r.line)};
        if (!events.empty() && !(e.time_us > events.back().time_us)) {
            throw ConfigError("switch times must be strictly increasing", r.line);
        }
        events.push_back(e);
    }
    return events;
}

std::vector<PartyLinkRequest> parse_requests(std::string_view text) {
    std::vector<PartyLinkRequest> out;
    for (const auto& r : data_rows(text, 3)) {
        PartyLinkRequest q{to_int(r.fields[0], r.line), to_int(r.fields[1], r.line), to_int(r.fields[2], r.line)};
        if (q.party_a == q.party_b) throw ConfigError("a party cannot link to itself", r.line);
        if (q.demand_rounds < 1) throw ConfigError("demand must be at least 1", r.line);
        out.push_back(q);
    }
    return out;
}

ConversionDevice parse_device_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("device config: ") + e.what());
    }
    try {
        ConversionDevice d;
        d.length_mm = j.at("length_mm").get<double>();
        d.pm_pump = Frequency(j.at("pm_pump_ghz").get<std::int64_t>());
        d.beta_rad_per_mm_ghz = j.at("beta_rad_per_mm_ghz").get<double>();
        for (const auto& c : j.at("channels")) {
            const int index = c.at("index").get<int>();
            if (!d.calibration.emplace(index, ChannelCalibration{c.at("a").get<double>(), c.at("b_per_mw").get<double>()})
                     .second) {
                throw ConfigError("duplicate channel " + std::to_string(index) + " in device config");
            }
        }
        d.validate();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("device config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("device config: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace csqfc
