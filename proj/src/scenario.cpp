#include "csqfc/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "csqfc/errors.hpp"
#include "csqfc/fit.hpp"
#include "csqfc/io.hpp"
#include "csqfc/pump_bank.hpp"
#include "csqfc/scheduler.hpp"
#include "csqfc/spectral.hpp"
#include "json.hpp"

namespace csqfc {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& scenario_kinds() {
    static const std::vector<std::string> kinds{"efficiency-sweep", "bandwidth-scan", "switching", "coincidence",
                                                "matrix",           "schedule",       "fit"};
    return kinds;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

// Records every file written so the manifest can list them.
class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw std::ios_base::failure("cannot create " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        write_raw(name, content);
        files_.emplace_back(name, sha256_hex(content));
    }

    void write_raw(const std::string& name, const std::string& content) const {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw std::ios_base::failure("cannot write " + (dir_ / name).string());
        out << content;
        out.flush();
        if (!out) throw std::ios_base::failure("write failed for " + (dir_ / name).string());
    }

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

struct Context {
    const Scenario& scenario;
    json config;
    fs::path base_dir;
    OutputDir out;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest

    std::string read_input(const std::string& rel) {
        const fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base_dir / rel;
        std::string text;
        try {
            text = read_file(p.string());
        } catch (const std::ios_base::failure&) {
            throw ConfigError("cannot read input file '" + p.string() + "'");
        }
        inputs.emplace_back(rel, sha256_hex(text));
        return text;
    }
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

ChannelPlan parse_plan(const json& j) {
    ChannelPlan p;
    p.base = Frequency(j.at("base_ghz").get<std::int64_t>());
    p.spacing_ghz = get_or<std::int64_t>(j, "spacing_ghz", 25);
    p.count = j.at("count").get<int>();
    p.direction = get_or<int>(j, "direction", 1);
    p.validate();
    return p;
}

ConversionDevice device_from(const json& cfg, Context* ctx, const fs::path& base_dir) {
    if (cfg.contains("device")) return parse_device_json(cfg.at("device").dump());
    if (cfg.contains("device_file")) {
        const auto rel = cfg.at("device_file").get<std::string>();
        if (ctx) return parse_device_json(ctx->read_input(rel));
        return parse_device_json(read_file((base_dir / rel).string()));
    }
    throw ConfigError("config needs either 'device' or 'device_file'");
}

DetectorParams parse_detector(const json& j) {
    DetectorParams d;
    d.efficiency = get_or(j, "efficiency", d.efficiency);
    d.dark_rate_hz = get_or(j, "dark_rate_hz", d.dark_rate_hz);
    d.jitter_ps = get_or(j, "jitter_ps", d.jitter_ps);
    return d;
}

ConversionScenario conversion_from(const json& cfg, Context* ctx, const fs::path& base_dir) {
    ConversionScenario s;
    if (cfg.contains("source")) {
        const auto& j = cfg.at("source");
        s.source.mean_pairs = get_or(j, "mean_pairs", s.source.mean_pairs);
        s.source.herald_efficiency = get_or(j, "herald_efficiency", s.source.herald_efficiency);
        s.source.signal_path_efficiency = get_or(j, "signal_path_efficiency", s.source.signal_path_efficiency);
        s.source.window_rate_hz = get_or(j, "window_rate_hz", s.source.window_rate_hz);
        s.source.coherence_ps = get_or(j, "coherence_ps", s.source.coherence_ps);
    }
    if (cfg.contains("herald_detector")) s.herald_detector = parse_detector(cfg.at("herald_detector"));
    if (cfg.contains("channel_detector")) s.channel_detector = parse_detector(cfg.at("channel_detector"));
    s.device = device_from(cfg, ctx, base_dir);
    s.pump_plan = parse_plan(cfg.at("pump_plan"));
    s.output_plan = parse_plan(cfg.at("output_plan"));
    s.signal = Frequency(cfg.at("signal_ghz").get<std::int64_t>());
    if (cfg.contains("pump_power_mw")) {
        for (const auto& [key, value] : cfg.at("pump_power_mw").items()) s.pump_power_mw[std::stoi(key)] = value.get<double>();
    }
    const int n = s.output_plan.count;
    s.crosstalk = CrosstalkMatrix::identity(n);
    if (cfg.contains("crosstalk")) {
        const auto& x = cfg.at("crosstalk");
        if (x.is_string()) {
            if (x.get<std::string>() != "identity") throw ConfigError("unknown crosstalk preset '" + x.get<std::string>() + "'");
        } else if (x.is_object()) {
            s.crosstalk = CrosstalkMatrix::nearest_neighbour(n, x.at("nearest_neighbour").get<double>());
        } else {
            CrosstalkMatrix m(n);
            if (x.size() != static_cast<std::size_t>(n)) throw ConfigError("crosstalk matrix must have one row per output channel");
            for (int j = 1; j <= n; ++j) {
                const auto& row = x.at(static_cast<std::size_t>(j - 1));
                if (row.size() != static_cast<std::size_t>(n)) throw ConfigError("crosstalk matrix must be square");
                for (int k = 1; k <= n; ++k) m.set_leak(j, k, row.at(static_cast<std::size_t>(k - 1)).get<double>());
            }
            s.crosstalk = m;
        }
    }
    s.noise_rate_hz = get_or(cfg, "noise_rate_hz", s.noise_rate_hz);
    s.windows = get_or<std::int64_t>(cfg, "windows", s.windows);
    s.loss_before_conversion = get_or(cfg, "loss_before_conversion", s.loss_before_conversion);
    s.threads = get_or(cfg, "threads", s.threads);
    s.validate();
    // The converted photon must land on the output grid for every pump.
    for (int i = 1; i <= s.pump_plan.count; ++i) {
        if (!s.converted_channel(i)) {
            throw ConfigError("pump channel " + std::to_string(i) + " converts off the output channel grid");
        }
    }
    return s;
}

void run_efficiency_sweep(Context& ctx) {
    const auto device = device_from(ctx.config, &ctx, ctx.base_dir);
    const double p_min = get_or(ctx.config, "power_min_mw", 0.0);
    const double p_max = get_or(ctx.config, "power_max_mw", kEdfaMaxPowerMw);
    const double step = get_or(ctx.config, "power_step_mw", 1.0);
    if (!(step > 0.0) || p_max < p_min || p_min < 0.0) throw ConfigError("invalid power sweep range");

    std::ostringstream curve;
    curve << "pump_power_mw";
    for (const auto& [ch, cal] : device.calibration) curve << ",eta_ch" << ch;
    curve << '\n';
    const auto steps = static_cast<long>(std::floor((p_max - p_min) / step + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        const double p = p_min + static_cast<double>(k) * step;
        curve << fmt("%.6f", p);
        for (const auto& [ch, cal] : device.calibration) curve << fmt(",%.12f", conversion_efficiency(cal.a, cal.b_per_mw, p));
        curve << '\n';
    }
    ctx.out.write("efficiency_sweep.csv", curve.str());

    std::ostringstream peaks;
    peaks << "channel,a,b_per_mw,optimal_power_mw,peak_efficiency\n";
    for (const auto& [ch, cal] : device.calibration) {
        const double p_star = optimal_pump_power(cal.b_per_mw);
        peaks << ch << fmt(",%.6f", cal.a) << fmt(",%.6f", cal.b_per_mw) << fmt(",%.6f", p_star)
              << fmt(",%.15f", conversion_efficiency(cal.a, cal.b_per_mw, p_star)) << '\n';
    }
    ctx.out.write("optimum.csv", peaks.str());
}

void run_bandwidth_scan(Context& ctx) {
    auto device = device_from(ctx.config, &ctx, ctx.base_dir);
    const auto& cfg = ctx.config;
    if (cfg.contains("beta_calibration")) {
        const auto& bc = cfg.at("beta_calibration");
        const double floor_eff = bc.at("min_efficiency").get<double>();
        const double retention = floor_eff / device.envelope_peak();
        if (retention > 1.0) {
            throw InfeasibleError("no beta keeps the envelope at " + fmt("%.3f", floor_eff) +
                                  ": the envelope peak is only " + fmt("%.3f", device.envelope_peak()));
        }
        device.beta_rad_per_mm_ghz =
            calibrate_beta(device.length_mm, bc.at("max_detuning_ghz").get<std::int64_t>(), retention);
    }
    const Frequency scan_low(cfg.at("scan_low_ghz").get<std::int64_t>());
    const Frequency scan_high(cfg.at("scan_high_ghz").get<std::int64_t>());
    const auto scan_step = get_or<std::int64_t>(cfg, "scan_step_ghz", 25);
    const Frequency band_low(cfg.at("band_low_ghz").get<std::int64_t>());
    const Frequency band_high(cfg.at("band_high_ghz").get<std::int64_t>());
    const auto spacing = get_or<std::int64_t>(cfg, "spacing_ghz", 25);
    const double threshold = get_or(cfg, "threshold", 0.40);
    if (scan_step <= 0 || spacing <= 0) throw ConfigError("scan step and spacing must be positive");

    std::ostringstream env;
    env << "pump_ghz,phase_mismatch_rad_per_mm,envelope_efficiency,meets_threshold\n";
    for (std::int64_t f = scan_low.ghz(); f <= scan_high.ghz(); f += scan_step) {
        const Frequency pump(f);
        const double e = envelope_efficiency(device, pump);
        env << f << fmt(",%.9e", phase_mismatch(device, pump)) << fmt(",%.9f", e) << ',' << (e >= threshold ? 1 : 0)
            << '\n';
    }
    ctx.out.write("envelope.csv", env.str());

    const int count = selectable_channel_count(band_low, band_high, spacing);
    std::ostringstream chans;
    chans << "channel,pump_ghz,envelope_efficiency,meets_threshold\n";
    double min_env = count > 0 ? 1.0 : 0.0;
    int meeting = 0;
    for (int i = 0; i < count; ++i) {
        const Frequency pump(band_low.ghz() + i * spacing);
        const double e = envelope_efficiency(device, pump);
        min_env = std::min(min_env, e);
        meeting += e >= threshold ? 1 : 0;
        chans << i + 1 << ',' << pump.ghz() << fmt(",%.9f", e) << ',' << (e >= threshold ? 1 : 0) << '\n';
    }
    ctx.out.write("band_channels.csv", chans.str());

    const auto usable = usable_band(device, scan_low, scan_high, scan_step, threshold);
    std::ostringstream sum;
    sum << "beta_rad_per_mm_ghz,envelope_peak,threshold,band_low_ghz,band_high_ghz,channel_count,"
           "min_envelope_efficiency,channels_meeting_threshold,usable_low_ghz,usable_high_ghz,usable_channel_count\n";
    sum << fmt("%.9e", device.beta_rad_per_mm_ghz) << fmt(",%.6f", device.envelope_peak()) << fmt(",%.6f", threshold)
        << ',' << band_low.ghz() << ',' << band_high.ghz() << ',' << count << fmt(",%.9f", min_env) << ',' << meeting;
    if (usable) {
        sum << ',' << usable->low.ghz() << ',' << usable->high.ghz() << ','
            << selectable_channel_count(usable->low, usable->high, spacing) << '\n';
    } else {
        sum << ",,,0\n";
    }
    ctx.out.write("bandwidth_summary.csv", sum.str());
}

void run_switching(Context& ctx) {
    const auto& cfg = ctx.config;
    std::vector<PumpChannelConfig> configs;
    for (const auto& c : cfg.at("channels")) {
        PumpChannelConfig p;
        p.channel_index = c.at("index").get<int>();
        p.frequency = Frequency(c.at("frequency_ghz").get<std::int64_t>());
        p.steady_power_mw = c.at("steady_power_mw").get<double>();
        p.shutter_rise_fall_us = get_or(c, "rise_fall_us", 0.5);
        p.validate();
        configs.push_back(p);
    }
    const double horizon = cfg.at("horizon_us").get<double>();
    SwitchSchedule schedule;
    if (cfg.contains("schedule_file")) {
        schedule = SwitchSchedule(parse_switch_events(ctx.read_input(cfg.at("schedule_file").get<std::string>())), horizon);
    } else {
        std::vector<int> ids;
        for (const auto& c : configs) ids.push_back(c.channel_index);
        schedule = SwitchSchedule::alternating(ids, cfg.at("interval_us").get<double>(), horizon);
    }
    EdfaTransient transient;
    if (cfg.contains("edfa")) {
        transient.overshoot = get_or(cfg.at("edfa"), "overshoot", transient.overshoot);
        transient.decay_us = get_or(cfg.at("edfa"), "decay_us", transient.decay_us);
    }
    const double dt = get_or(cfg, "dt_us", default_dt_us(configs));
    PumpWaveform wf = [&] {
        try {
            return render_waveform(configs, schedule, dt, transient);
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }();
    ctx.out.write("waveform.csv", waveform_csv(wf));

    // Edge timing belongs to the shutters, so it is measured without the EDFA transient.
    const PumpWaveform shutters = render_waveform(configs, schedule, dt, EdfaTransient{0.0, transient.decay_us});
    std::ostringstream edges;
    edges << "channel,shutter_rise_us,shutter_fall_us,longest_flat_top_us,peak_over_steady,min_switch_interval_us,"
             "schedule_min_gap_us\n";
    const double min_interval = min_switch_interval(configs);
    for (const auto& c : configs) {
        edges << c.channel_index;
        try {
            const auto rf = measure_rise_fall(shutters, c.channel_index);
            edges << fmt(",%.6f", rf.rise_us) << fmt(",%.6f", rf.fall_us);
        } catch (const MeasurementError&) {
            edges << ",,";
        }
        double longest = 0.0;
        for (double d : plateau_durations(shutters, c.channel_index, 0.99)) longest = std::max(longest, d);
        double peak = 0.0;
        for (double p : wf.power(c.channel_index)) peak = std::max(peak, p);
        edges << fmt(",%.6f", longest) << fmt(",%.6f", peak / c.steady_power_mw) << fmt(",%.6f", min_interval) << fmt(",%.6f", schedule.min_gap_us()) << '\n';
    }
    ctx.out.write("edges.csv", edges.str());

    if (cfg.contains("device") || cfg.contains("device_file")) {
        const auto device = device_from(cfg, &ctx, ctx.base_dir);
        std::ostringstream conv;
        conv << "t_us";
        for (int ch : wf.channels()) conv << ",eta_ch" << ch;
        conv << '\n';
        for (std::size_t k = 0; k < wf.sample_count(); ++k) {
            conv << fmt("%.6f", wf.time_us(k));
            for (int ch : wf.channels()) conv << fmt(",%.9f", instantaneous_efficiency(wf, ch, device, wf.time_us(k)));
            conv << '\n';
        }
        ctx.out.write("converted.csv", conv.str());
    }
}

MatrixOptions matrix_options(const json& cfg) {
    MatrixOptions o;
    o.bin_width_ps = get_or(cfg, "bin_ps", o.bin_width_ps);
    o.span_ps = get_or(cfg, "span_ps", o.span_ps);
    o.window_ps = get_or(cfg, "window_ps", o.window_ps);
    o.plateau_factor = get_or(cfg, "plateau_factor", o.plateau_factor);
    return o;
}

void run_coincidence(Context& ctx, std::uint64_t seed) {
    auto sc = conversion_from(ctx.config, &ctx, ctx.base_dir);
    if (ctx.scenario.threads) sc.threads = *ctx.scenario.threads;
    const auto opt = matrix_options(ctx.config);
    const int pump = ctx.config.at("pump_channel").get<int>();
    if (pump < 1 || pump > sc.pump_plan.count) throw ConfigError("pump_channel outside the pump plan");
    const int out_ch = *sc.converted_channel(pump);

    const auto run = simulate_run(sc, pump, seed);
    if (get_or(ctx.config, "export_events", false)) ctx.out.write("events.csv", events_csv(run.events));
    const auto hist = accumulate_histogram(run.events, 0, out_ch, opt.bin_width_ps, opt.span_ps, run.duration_s);
    ctx.out.write("histogram.csv", histogram_csv(hist, opt.window_ps, opt.plateau_factor));

    std::ostringstream sum;
    sum << "pump_channel,output_channel,herald_singles,channel_singles,coincidences,g,std_err,analytic_g\n";
    sum << pump << ',' << out_ch << ',' << hist.herald_singles << ',' << hist.channel_singles;
    try {
        const auto g = estimate_cross_correlation(hist, opt.window_ps, opt.plateau_factor);
        sum << ',' << g.coincidences << fmt(",%.6f", g.g) << fmt(",%.6f", g.std_err);
    } catch (const UndefinedCorrelation& u) {
        sum << ',' << u.coincidences() << ",,";
    }
    sum << fmt(",%.6f", analytic_g(analytic_inputs(sc, pump, out_ch, opt.window_ps))) << '\n';
    ctx.out.write("coincidence_summary.csv", sum.str());
}

void run_matrix(Context& ctx, std::uint64_t seed) {
    auto sc = conversion_from(ctx.config, &ctx, ctx.base_dir);
    if (ctx.scenario.threads) sc.threads = *ctx.scenario.threads;
    const auto m = cross_corr_matrix(sc, seed, matrix_options(ctx.config));
    ctx.out.write("matrix.csv", matrix_csv(m));

    std::ostringstream grid;
    grid << "pump_channel";
    for (int j : m.output_channels) grid << ",g_out" << j;
    grid << '\n';
    for (std::size_t i = 0; i < m.pump_channels.size(); ++i) {
        grid << m.pump_channels[i];
        for (const auto& e : m.entries[i]) grid << (e.defined ? fmt(",%.4f", e.g) : std::string(","));
        grid << '\n';
    }
    ctx.out.write("matrix_grid.csv", grid.str());
}

void run_schedule(Context& ctx) {
    const auto& cfg = ctx.config;
    NetworkConfig net;
    net.pump_plan = parse_plan(cfg.at("pump_plan"));
    net.signal = Frequency(cfg.at("signal_ghz").get<std::int64_t>());
    net.midpoints = get_or(cfg, "midpoints", 1);
    if (cfg.contains("max_rounds")) net.max_rounds = cfg.at("max_rounds").get<int>();
    net.validate();

    std::vector<PartyLinkRequest> requests;
    if (cfg.contains("requests_file")) {
        requests = parse_requests(ctx.read_input(cfg.at("requests_file").get<std::string>()));
    } else {
        for (const auto& r : cfg.at("requests")) {
            requests.push_back({r.at(0).get<int>(), r.at(1).get<int>(), r.size() > 2 ? r.at(2).get<int>() : 1});
        }
    }
    RateConstraint rc;
    if (cfg.contains("constraint")) {
        const auto& c = cfg.at("constraint");
        rc.tau_s_us = get_or(c, "tau_s_us", rc.tau_s_us);
        rc.tau_c_us = get_or(c, "tau_c_us", rc.tau_c_us);
        rc.round_period_us = get_or(c, "round_period_us", rc.round_period_us);
    }
    rc.validate();

    const auto rounds = schedule(requests, net, rc);
    const auto problems = validate_schedule(requests, net, rounds);
    if (!problems.empty()) throw InfeasibleError("scheduler produced an invalid schedule: " + problems.front());
    ctx.out.write("schedule.csv", schedule_csv(rounds));

    std::vector<PumpChannelConfig> pumps;
    const double rise_fall = get_or(cfg, "rise_fall_us", 0.5);
    for (int c = 1; c <= net.pump_plan.count; ++c) {
        pumps.push_back({c, channel_frequency(net.pump_plan, c), 200.0, rise_fall});
    }
    const auto rep = feasibility_report(rounds, pumps, rc, net);
    std::ostringstream fr;
    fr << "rounds,channel_switches,violations,min_switch_interval_us,utilization,duty_factor,effective_rate_per_s\n";
    const double success = get_or(cfg, "success_prob", 1.0);
    fr << rep.rounds << ',' << rep.channel_switches << ',' << rep.violations.size()
       << fmt(",%.6f", rep.min_switch_interval_us) << fmt(",%.6f", rep.utilization) << fmt(",%.6f", duty_factor(rc))
       << fmt(",%.6f", effective_rate(rc, success)) << '\n';
    ctx.out.write("feasibility.csv", fr.str());

    std::ostringstream viol;
    viol << "party,from_round,to_round,from_channel,to_channel,separation_us\n";
    for (const auto& v : rep.violations) {
        viol << v.party << ',' << v.from_round << ',' << v.to_round << ',' << v.from_channel << ',' << v.to_channel
             << fmt(",%.6f", v.separation_us) << '\n';
    }
    ctx.out.write("switch_violations.csv", viol.str());
}

void run_fit(Context& ctx) {
    const auto curves = parse_calibration(ctx.read_input(ctx.config.at("calibration_file").get<std::string>()));
    FitOptions opt;
    opt.max_iterations = get_or(ctx.config, "max_iterations", opt.max_iterations);
    std::ostringstream os;
    os << "pump_channel,a,b_per_mw,rms_residual,iterations,optimal_power_mw\n";
    for (const auto& [ch, curve] : curves) {
        FitResult r;
        try {
            r = fit_efficiency_curve(curve, opt);
        } catch (const FitError& e) {
            throw InfeasibleError("channel " + std::to_string(ch) + ": " + e.what());
        }
        os << ch << fmt(",%.9f", r.a) << fmt(",%.9e", r.b_per_mw) << fmt(",%.9e", r.rms_residual) << ',' << r.iterations
           << fmt(",%.6f", optimal_pump_power(r.b_per_mw)) << '\n';
    }
    ctx.out.write("fit.csv", os.str());
}

std::string manifest(const Context& ctx, const std::string& config_digest) {
    std::ostringstream os;
    os << "kind=" << ctx.scenario.kind << '\n';
    os << "config=" << ctx.scenario.config_path << '\n';
    os << "config_sha256=" << config_digest << '\n';
    os << "seed=" << (ctx.scenario.seed ? std::to_string(*ctx.scenario.seed) : std::string("none")) << '\n';
    os << "version=" << kVersion << '\n';
    for (const auto& [path, digest] : ctx.inputs) os << "input=" << path << " sha256=" << digest << '\n';
    for (const auto& [name, digest] : ctx.out.files()) os << "output=" << name << " sha256=" << digest << '\n';
    return os.str();
}

}  // namespace

ConversionScenario parse_conversion_scenario(std::string_view json_text, const std::string& base_dir) {
    try {
        return conversion_from(json::parse(json_text), nullptr, base_dir);
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
}

RunResult run(const Scenario& scenario) {
    RunResult result;
    auto fail = [&](ExitCode code, const std::string& msg) {
        result.code = code;
        result.message = msg;
        return result;
    };

    const auto& kinds = scenario_kinds();
    if (std::find(kinds.begin(), kinds.end(), scenario.kind) == kinds.end()) {
        return fail(ExitCode::config_error, "unknown scenario kind '" + scenario.kind + "'");
    }
    const bool stochastic = scenario.kind == "coincidence" || scenario.kind == "matrix";
    if (stochastic && !scenario.seed) return fail(ExitCode::config_error, scenario.kind + " requires --seed");

    std::string text;
    try {
        text = read_file(scenario.config_path);
    } catch (const std::ios_base::failure& e) {
        return fail(ExitCode::config_error, std::string("cannot read config: ") + e.what());
    }
    json config;
    try {
        config = json::parse(text);
    } catch (const json::parse_error& e) {
        return fail(ExitCode::config_error, scenario.config_path + ": " + e.what());
    }
    if (config.contains("kind") && config.at("kind") != scenario.kind) {
        return fail(ExitCode::config_error, scenario.config_path + ": config kind '" +
                                                config.at("kind").get<std::string>() + "' does not match '" +
                                                scenario.kind + "'");
    }

    try {
        Context ctx{scenario, config, fs::path(scenario.config_path).parent_path(), OutputDir(scenario.output_dir), {}};
        if (scenario.kind == "efficiency-sweep") run_efficiency_sweep(ctx);
        else if (scenario.kind == "bandwidth-scan") run_bandwidth_scan(ctx);
        else if (scenario.kind == "switching") run_switching(ctx);
        else if (scenario.kind == "coincidence") run_coincidence(ctx, *scenario.seed);
        else if (scenario.kind == "matrix") run_matrix(ctx, *scenario.seed);
        else if (scenario.kind == "schedule") run_schedule(ctx);
        else if (scenario.kind == "fit") run_fit(ctx);

        ctx.out.write_raw("manifest.txt", manifest(ctx, sha256_hex(text)));
        for (const auto& [name, digest] : ctx.out.files()) result.outputs.push_back(name);
        result.outputs.push_back("manifest.txt");
        return result;
    } catch (const ConfigError& e) {
        return fail(ExitCode::config_error, scenario.config_path + ": " + e.what());
    } catch (const json::exception& e) {
        return fail(ExitCode::config_error, scenario.config_path + ": " + e.what());
    } catch (const DomainError& e) {
        return fail(ExitCode::config_error, scenario.config_path + ": " + e.what());
    } catch (const RangeError& e) {
        return fail(ExitCode::config_error, scenario.config_path + ": " + e.what());
    } catch (const InfeasibleError& e) {
        return fail(ExitCode::infeasible, e.what());
    } catch (const std::ios_base::failure& e) {
        return fail(ExitCode::io_error, e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(ExitCode::io_error, e.what());
    }
}

}  // namespace csqfc
