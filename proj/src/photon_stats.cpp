#include "csqfc/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace csqfc {

void SourceParams::validate() const {
    if (!(mean_pairs > 0.0)) throw ConfigError("mean pair number must be positive");
    if (!(herald_efficiency >= 0.0 && herald_efficiency <= 1.0)) throw ConfigError("herald efficiency outside [0, 1]");
    if (!(signal_path_efficiency >= 0.0 && signal_path_efficiency <= 1.0)) {
        throw ConfigError("signal path efficiency outside [0, 1]");
    }
    if (!(window_rate_hz > 0.0)) throw ConfigError("window rate must be positive");
    if (!(coherence_ps >= 0.0 && coherence_ps <= slot_period_ps())) {
        throw ConfigError("coherence time must lie within one slot period");
    }
}

void DetectorParams::validate() const {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConfigError("detector efficiency outside [0, 1]");
    if (!(dark_rate_hz >= 0.0)) throw ConfigError("dark count rate must be non-negative");
    if (!(jitter_ps >= 0.0)) throw ConfigError("detector jitter must be non-negative");
}

CrosstalkMatrix::CrosstalkMatrix(int channels) : n_(channels) {
    if (channels < 1) throw ConfigError("crosstalk matrix needs at least one channel");
    leak_.assign(static_cast<std::size_t>(channels * channels), 0.0);
}

CrosstalkMatrix CrosstalkMatrix::identity(int channels) {
    CrosstalkMatrix m(channels);
    for (int j = 1; j <= channels; ++j) m.set_leak(j, j, 1.0);
    return m;
}

CrosstalkMatrix CrosstalkMatrix::nearest_neighbour(int channels, double fraction) {
    CrosstalkMatrix m(channels);
    for (int k = 1; k <= channels; ++k) {
        double kept = 1.0;
        for (int j : {k - 1, k + 1}) {
            if (j < 1 || j > channels) continue;
            m.set_leak(j, k, fraction);
            kept -= fraction;
        }
        m.set_leak(k, k, kept);
    }
    m.validate();
    return m;
}

std::size_t CrosstalkMatrix::index(int out_channel, int in_channel) const {
    if (out_channel < 1 || out_channel > n_ || in_channel < 1 || in_channel > n_) {
        throw RangeError("crosstalk index outside 1.." + std::to_string(n_));
    }
    return static_cast<std::size_t>((out_channel - 1) * n_ + (in_channel - 1));
}

double CrosstalkMatrix::leak(int out_channel, int in_channel) const { return leak_[index(out_channel, in_channel)]; }

void CrosstalkMatrix::set_leak(int out_channel, int in_channel, double p) { leak_[index(out_channel, in_channel)] = p; }

void CrosstalkMatrix::validate() const {
    for (int k = 1; k <= n_; ++k) {
        double column = 0.0;
        for (int j = 1; j <= n_; ++j) {
            const double p = leak(j, k);
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("crosstalk entry outside [0, 1]");
            column += p;
            if (p > leak(k, k)) throw ConfigError("crosstalk off-diagonal exceeds the diagonal");
        }
        if (column > 1.0 + 1e-12) throw ConfigError("crosstalk column " + std::to_string(k) + " sums above one");
    }
}

void ConversionScenario::validate() const {
    source.validate();
    herald_detector.validate();
    channel_detector.validate();
    device.validate();
    pump_plan.validate();
    output_plan.validate();
    crosstalk.validate();
    if (crosstalk.size() != output_plan.count) throw ConfigError("crosstalk size differs from the output channel count");
    if (!(noise_rate_hz >= 0.0)) throw ConfigError("noise rate must be non-negative");
    if (windows < 0) throw ConfigError("window count must be non-negative");
    if (threads < 1) throw ConfigError("thread count must be at least 1");
    for (const auto& [ch, p] : pump_power_mw) {
        if (!(p >= 0.0)) throw ConfigError("pump power for channel " + std::to_string(ch) + " is negative");
    }
}

double ConversionScenario::pump_power(int pump_channel) const {
    auto it = pump_power_mw.find(pump_channel);
    if (it != pump_power_mw.end()) return it->second;
    return optimal_pump_power(device.channel(pump_channel).b_per_mw);
}

double ConversionScenario::conversion_efficiency_of(int pump_channel) const {
    const auto& cal = device.channel(pump_channel);
    return conversion_efficiency(cal.a, cal.b_per_mw, pump_power(pump_channel));
}

std::optional<int> ConversionScenario::converted_channel(int pump_channel) const {
    const Frequency pump = channel_frequency(pump_plan, pump_channel);
    if (signal <= pump) return std::nullopt;
    return frequency_to_channel(output_plan, converted_frequency(signal, pump));
}

double ConversionScenario::duration_s() const {
    return static_cast<double>(windows) * source.slot_period_ps() * 1e-12;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t counter) {
    // splitmix64 finalizer applied to a mix of the three words.
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(master) ^ stream) ^ counter);
}

namespace {

constexpr std::int64_t kBlockSlots = 1 << 16;
constexpr std::uint64_t kPairStream = 0;
constexpr std::uint64_t kNoiseStream = 1;  // + detector id

struct BlockResult {
    std::vector<DetectionEvent> events;
    std::vector<std::int64_t> true_coincidences;
};

struct RunPlan {
    double slot_ps;
    double coherence_ps;
    double mean_pairs;
    double herald_prob;   // per idler photon
    double path_eff;
    double conversion_eff;
    bool loss_first;
    std::optional<int> target;  // DeMux input channel of the converted photon
    std::vector<double> route_cdf;  // cumulative leak into outputs 1..M from `target`
    double channel_det_eff;
    double herald_jitter;
    double channel_jitter;
    std::vector<double> noise_hz;  // per detector, 0 = herald
    int outputs;
};

BlockResult simulate_block(const RunPlan& plan, std::uint64_t seed, std::int64_t block, std::int64_t first_slot,
                           std::int64_t end_slot) {
    BlockResult out;
    out.true_coincidences.assign(static_cast<std::size_t>(plan.outputs), 0);

    std::mt19937_64 rng(derive_seed(seed, kPairStream, static_cast<std::uint64_t>(block)));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Thermal statistics: P(n >= k + 1 | n >= k) = mu / (1 + mu).
    const double occupied = plan.mean_pairs / (1.0 + plan.mean_pairs);
    std::geometric_distribution<std::int64_t> skip(occupied);
    std::geometric_distribution<std::int64_t> extra(1.0 - occupied);

    const auto outputs = static_cast<std::size_t>(plan.outputs);
    std::vector<double> first_click(outputs);
    std::vector<bool> true_hit(outputs);

    for (std::int64_t slot = first_slot + skip(rng); slot < end_slot; slot += 1 + skip(rng)) {
        const std::int64_t pairs = 1 + extra(rng);
        const double t0 = static_cast<double>(slot) * plan.slot_ps;
        double herald_time = std::numeric_limits<double>::infinity();
        std::fill(first_click.begin(), first_click.end(), std::numeric_limits<double>::infinity());
        std::fill(true_hit.begin(), true_hit.end(), false);

        for (std::int64_t p = 0; p < pairs; ++p) {
            const double emitted = t0 + uniform(rng) * plan.coherence_ps;
            const bool idler_seen = uniform(rng) < plan.herald_prob;
            if (idler_seen) herald_time = std::min(herald_time, emitted + plan.herald_jitter * gauss(rng));

            bool alive;
            if (plan.loss_first) {
                alive = uniform(rng) < plan.path_eff;
                alive = alive && uniform(rng) < plan.conversion_eff;
            } else {
                alive = uniform(rng) < plan.conversion_eff;
                alive = alive && uniform(rng) < plan.path_eff;
            }
            if (!alive || !plan.target) continue;
            const double u = uniform(rng);
            const auto lane = static_cast<std::size_t>(
                std::upper_bound(plan.route_cdf.begin(), plan.route_cdf.end(), u) - plan.route_cdf.begin());
            if (lane >= outputs) continue;  // lost in the DeMux
            if (!(uniform(rng) < plan.channel_det_eff)) continue;
            first_click[lane] = std::min(first_click[lane], emitted + plan.channel_jitter * gauss(rng));
            if (idler_seen) true_hit[lane] = true;
        }

        const bool herald_click = std::isfinite(herald_time);
        if (herald_click) out.events.push_back({0, herald_time});
        for (std::size_t j = 0; j < outputs; ++j) {
            if (!std::isfinite(first_click[j])) continue;
            out.events.push_back({static_cast<int>(j + 1), first_click[j]});
            if (herald_click && true_hit[j]) ++out.true_coincidences[j];
        }
    }

    const double t_begin = static_cast<double>(first_slot) * plan.slot_ps;
    const double span_ps = static_cast<double>(end_slot - first_slot) * plan.slot_ps;
    for (std::size_t d = 0; d < plan.noise_hz.size(); ++d) {
        if (plan.noise_hz[d] <= 0.0) continue;
        std::mt19937_64 noise_rng(derive_seed(seed, kNoiseStream + d, static_cast<std::uint64_t>(block)));
        std::poisson_distribution<std::int64_t> count(plan.noise_hz[d] * span_ps * 1e-12);
        const std::int64_t n = count(noise_rng);
        std::uniform_real_distribution<double> when(t_begin, t_begin + span_ps);
        for (std::int64_t i = 0; i < n; ++i) out.events.push_back({static_cast<int>(d), when(noise_rng)});
    }
    return out;
}

bool event_order(const DetectionEvent& a, const DetectionEvent& b) {
    if (a.time_ps != b.time_ps) return a.time_ps < b.time_ps;
    return a.detector < b.detector;
}

}  // namespace

SimulationRun simulate_run(const ConversionScenario& scenario, int pump_channel, std::uint64_t seed) {
    scenario.validate();
    if (pump_channel < 1 || pump_channel > scenario.pump_plan.count) {
        throw ConfigError("pump channel " + std::to_string(pump_channel) + " is not in the pump plan");
    }

    RunPlan plan;
    plan.slot_ps = scenario.source.slot_period_ps();
    plan.coherence_ps = scenario.source.coherence_ps;
    plan.mean_pairs = scenario.source.mean_pairs;
    plan.herald_prob = scenario.source.herald_efficiency * scenario.herald_detector.efficiency;
    plan.path_eff = scenario.source.signal_path_efficiency;
    plan.conversion_eff = scenario.conversion_efficiency_of(pump_channel);
    plan.loss_first = scenario.loss_before_conversion;
    plan.target = scenario.converted_channel(pump_channel);
    plan.outputs = scenario.output_plan.count;
    if (plan.target) {
        double acc = 0.0;
        for (int j = 1; j <= plan.outputs; ++j) {
            acc += scenario.crosstalk.leak(j, *plan.target);
            plan.route_cdf.push_back(acc);
        }
    }
    plan.channel_det_eff = scenario.channel_detector.efficiency;
    plan.herald_jitter = scenario.herald_detector.jitter_ps;
    plan.channel_jitter = scenario.channel_detector.jitter_ps;
    plan.noise_hz.push_back(scenario.herald_detector.dark_rate_hz);
    for (int j = 1; j <= plan.outputs; ++j) {
        plan.noise_hz.push_back(scenario.noise_rate_hz + scenario.channel_detector.dark_rate_hz);
    }

    const std::int64_t blocks = (scenario.windows + kBlockSlots - 1) / kBlockSlots;
    std::vector<BlockResult> results(static_cast<std::size_t>(blocks));
    auto work = [&](std::int64_t first_block, std::int64_t stride) {
        for (std::int64_t b = first_block; b < blocks; b += stride) {
            const std::int64_t begin = b * kBlockSlots;
            const std::int64_t end = std::min(scenario.windows, begin + kBlockSlots);
            results[static_cast<std::size_t>(b)] = simulate_block(plan, seed, b, begin, end);
        }
    };
    const auto workers = static_cast<std::int64_t>(std::min<std::int64_t>(scenario.threads, std::max<std::int64_t>(blocks, 1)));
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    }

    SimulationRun run;
    run.pump_channel = pump_channel;
    run.duration_s = scenario.duration_s();
    run.true_coincidences.assign(static_cast<std::size_t>(plan.outputs), 0);
    std::size_t total = 0;
    for (const auto& r : results) total += r.events.size();
    run.events.reserve(total);
    for (const auto& r : results) {
        run.events.insert(run.events.end(), r.events.begin(), r.events.end());
        for (std::size_t j = 0; j < r.true_coincidences.size(); ++j) run.true_coincidences[j] += r.true_coincidences[j];
    }
    std::sort(run.events.begin(), run.events.end(), event_order);
    return run;
}

double CoincidenceHistogram::bin_center_ps(std::size_t i) const {
    return (static_cast<double>(i) - half_bins + 0.5) * bin_width_ps;
}

std::int64_t CoincidenceHistogram::total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

CoincidenceHistogram accumulate_histogram(std::span<const DetectionEvent> events, int herald_id, int channel_id,
                                          double bin_width_ps, double span_ps, double accumulation_s) {
    if (!(bin_width_ps > 0.0)) throw DomainError("bin width must be positive");
    if (!(span_ps >= bin_width_ps)) throw DomainError("span must cover at least one bin");

    CoincidenceHistogram h;
    h.bin_width_ps = bin_width_ps;
    h.half_bins = static_cast<int>(std::floor(span_ps / bin_width_ps));
    h.counts.assign(static_cast<std::size_t>(2 * h.half_bins), 0);
    h.accumulation_s = accumulation_s;

    std::vector<double> heralds;
    std::vector<double> clicks;
    for (const auto& e : events) {
        if (e.detector == herald_id) heralds.push_back(e.time_ps);
        if (e.detector == channel_id) clicks.push_back(e.time_ps);
    }
    std::sort(heralds.begin(), heralds.end());
    std::sort(clicks.begin(), clicks.end());
    h.herald_singles = static_cast<std::int64_t>(heralds.size());
    h.channel_singles = static_cast<std::int64_t>(clicks.size());

    const double reach = h.half_bins * bin_width_ps;
    std::size_t lo = 0;
    for (double t : clicks) {
        // delay = t - herald in [-reach, reach)  <=>  herald in (t - reach, t + reach]
        while (lo < heralds.size() && heralds[lo] <= t - reach) ++lo;
        for (std::size_t k = lo; k < heralds.size() && heralds[k] <= t + reach; ++k) {
            const double delay = t - heralds[k];
            const auto bin = static_cast<long>(std::floor(delay / bin_width_ps)) + h.half_bins;
            if (bin < 0 || bin >= static_cast<long>(h.counts.size())) continue;
            ++h.counts[static_cast<std::size_t>(bin)];
        }
    }
    return h;
}

CrossCorrelation estimate_cross_correlation(const CoincidenceHistogram& hist, double window_ps,
                                            double plateau_factor) {
    if (!(window_ps > 0.0)) throw DomainError("coincidence window must be positive");
    const double half = 0.5 * window_ps;
    std::int64_t in_window = 0;
    std::size_t window_bins = 0;
    std::int64_t plateau = 0;
    std::size_t plateau_bins = 0;
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
        const double c = std::abs(hist.bin_center_ps(i));
        if (c <= half) {
            in_window += hist.counts[i];
            ++window_bins;
        }
        if (c > plateau_factor * half) {
            plateau += hist.counts[i];
            ++plateau_bins;
        }
    }
    if (plateau_bins < 10) {
        throw MeasurementError("only " + std::to_string(plateau_bins) + " plateau bins; need at least 10");
    }
    if (window_bins == 0) throw MeasurementError("coincidence window narrower than one bin");
    if (plateau == 0) throw UndefinedCorrelation("no accidental coincidences on the plateau", in_window);

    CrossCorrelation r;
    r.coincidences = in_window;
    r.plateau_counts = plateau;
    r.accidentals_per_window =
        static_cast<double>(plateau) / static_cast<double>(plateau_bins) * static_cast<double>(window_bins);
    r.g = static_cast<double>(in_window) / r.accidentals_per_window;
    const double rel_c = in_window > 0 ? 1.0 / static_cast<double>(in_window) : 0.0;
    const double rel_a = 1.0 / static_cast<double>(plateau);
    r.std_err = in_window > 0 ? r.g * std::sqrt(rel_c + rel_a) : 1.0 / r.accidentals_per_window;
    return r;
}

CrossCorrMatrix cross_corr_matrix(const ConversionScenario& scenario, std::uint64_t seed,
                                  const MatrixOptions& options) {
    CrossCorrMatrix m;
    for (int i = 1; i <= scenario.pump_plan.count; ++i) m.pump_channels.push_back(i);
    for (int j = 1; j <= scenario.output_plan.count; ++j) m.output_channels.push_back(j);

    for (int i : m.pump_channels) {
        const SimulationRun run = simulate_run(scenario, i, derive_seed(seed, 0x6d6174726978ULL, static_cast<std::uint64_t>(i)));
        std::vector<CrossCorrEntry> row;
        for (int j : m.output_channels) {
            CrossCorrEntry e;
            e.true_coincidences = run.true_coincidences[static_cast<std::size_t>(j - 1)];
            const auto hist =
                accumulate_histogram(run.events, 0, j, options.bin_width_ps, options.span_ps, run.duration_s);
            try {
                const auto g = estimate_cross_correlation(hist, options.window_ps, options.plateau_factor);
                e.defined = true;
                e.g = g.g;
                e.std_err = g.std_err;
                e.coincidences = g.coincidences;
                e.accidentals = g.accidentals_per_window;
                e.plateau_counts = g.plateau_counts;
            } catch (const UndefinedCorrelation& u) {
                e.coincidences = u.coincidences();
            }
            row.push_back(e);
        }
        m.entries.push_back(std::move(row));
    }
    return m;
}

ClickProbabilities thermal_click_probabilities(double mean_pairs, double herald_detection, double signal_detection) {
    if (!(mean_pairs > 0.0)) throw DomainError("mean pair number must be positive");
    // E[x^n] = 1 / (1 + mu (1 - x)) for the thermal distribution. A click is
    // "at least one photon detected", so P(no click | n) = (1 - eta)^n.
    auto gen = [mean_pairs](double x) { return 1.0 / (1.0 + mean_pairs * (1.0 - x)); };
    const double miss_h = 1.0 - herald_detection;
    const double miss_s = 1.0 - signal_detection;
    ClickProbabilities p;
    p.herald = 1.0 - gen(miss_h);
    p.signal = 1.0 - gen(miss_s);
    p.joint = 1.0 - gen(miss_h) - gen(miss_s) + gen(miss_h * miss_s);
    return p;
}

double analytic_g(const AnalyticInputs& in) {
    if (!(in.mean_pairs > 0.0)) throw DomainError("mean pair number must be positive");
    if (!(in.slot_period_ps > 0.0 && in.window_ps > 0.0)) throw DomainError("slot period and window must be positive");
    // Per slot of length S with window W (S >= W, so only same-slot pairs fall
    // inside the central window), and noise rates n_h, n_s per ps:
    //   coincidences C = p_hs + p_h n_s W + p_s n_h W + n_h n_s W S
    //   accidentals  A = (p_h + n_h S)(p_s + n_s S) W / S
    //   g = C / A
    // Lossless and noiseless with S = W this reduces to 1 + 1/mu.
    const auto p = thermal_click_probabilities(in.mean_pairs, in.herald_detection, in.signal_detection);
    const double s = in.slot_period_ps;
    const double w = in.window_ps;
    const double nh = in.herald_noise_hz * 1e-12;
    const double ns = in.signal_noise_hz * 1e-12;
    const double coinc = p.joint + p.herald * ns * w + p.signal * nh * w + nh * ns * w * s;
    const double acc = (p.herald + nh * s) * (p.signal + ns * s) * w / s;
    if (acc <= 0.0) throw DomainError("no accidental coincidences: g undefined");
    return coinc / acc;
}

AnalyticInputs analytic_inputs(const ConversionScenario& scenario, int pump_channel, int out_channel,
                               double window_ps) {
    AnalyticInputs in;
    in.mean_pairs = scenario.source.mean_pairs;
    in.herald_detection = scenario.source.herald_efficiency * scenario.herald_detector.efficiency;
    const auto target = scenario.converted_channel(pump_channel);
    const double route = target ? scenario.crosstalk.leak(out_channel, *target) : 0.0;
    in.signal_detection = scenario.source.signal_path_efficiency * scenario.conversion_efficiency_of(pump_channel) *
                          route * scenario.channel_detector.efficiency;
    in.herald_noise_hz = scenario.herald_detector.dark_rate_hz;
    in.signal_noise_hz = scenario.noise_rate_hz + scenario.channel_detector.dark_rate_hz;
    in.slot_period_ps = scenario.source.slot_period_ps();
    in.window_ps = window_ps;
    return in;
}

std::string events_csv(std::span<const DetectionEvent> events) {
    std::ostringstream os;
    os << "detector_id,time_ps\n";
    char buf[64];
    for (const auto& e : events) {
        std::snprintf(buf, sizeof buf, "%d,%.3f\n", e.detector, e.time_ps);
        os << buf;
    }
    return os.str();
}

std::string histogram_csv(const CoincidenceHistogram& hist, double window_ps, double plateau_factor) {
    double level = 0.0;
    try {
        const auto g = estimate_cross_correlation(hist, window_ps, plateau_factor);
        std::size_t window_bins = 0;
        for (std::size_t i = 0; i < hist.bin_count(); ++i) {
            if (std::abs(hist.bin_center_ps(i)) <= 0.5 * window_ps) ++window_bins;
        }
        level = g.accidentals_per_window / static_cast<double>(window_bins);
    } catch (const MeasurementError&) {
        level = 0.0;
    }
    std::ostringstream os;
    os << "delay_ps,counts,g_normalized\n";
    char buf[96];
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
        const double norm = level > 0.0 ? static_cast<double>(hist.counts[i]) / level : 0.0;
        std::snprintf(buf, sizeof buf, "%.1f,%lld,%.6f\n", hist.bin_center_ps(i),
                      static_cast<long long>(hist.counts[i]), norm);
        os << buf;
    }
    return os.str();
}

std::string matrix_csv(const CrossCorrMatrix& m) {
    std::ostringstream os;
    os << "pump_channel,output_channel,g,std_err,defined,coincidences,accidentals,true_coincidences\n";
    char buf[160];
    for (std::size_t i = 0; i < m.pump_channels.size(); ++i) {
        for (std::size_t j = 0; j < m.output_channels.size(); ++j) {
            const auto& e = m.entries[i][j];
            std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%d,%lld,%.6f,%lld\n", m.pump_channels[i],
                          m.output_channels[j], e.g, e.std_err, e.defined ? 1 : 0,
                          static_cast<long long>(e.coincidences), e.accidentals,
                          static_cast<long long>(e.true_coincidences));
            os << buf;
        }
    }
    return os.str();
}

}  // namespace csqfc
