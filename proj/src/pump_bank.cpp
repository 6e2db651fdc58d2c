#include "csqfc/pump_bank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <sstream>

#include "csqfc/errors.hpp"

namespace csqfc {

void PumpChannelConfig::validate() const {
    if (!(steady_power_mw > 0.0 && steady_power_mw <= kEdfaMaxPowerMw)) {
        throw ConfigError("pump channel " + std::to_string(channel_index) + ": steady power must lie in (0, 500] mW");
    }
    if (!(shutter_rise_fall_us > 0.0)) {
        throw ConfigError("pump channel " + std::to_string(channel_index) + ": rise/fall time must be positive");
    }
}

SwitchSchedule::SwitchSchedule(std::vector<SwitchEvent> events, double horizon_us)
    : events_(std::move(events)), horizon_us_(horizon_us) {
    if (!(horizon_us >= 0.0)) throw ConfigError("schedule horizon must be non-negative");
    for (std::size_t i = 0; i < events_.size(); ++i) {
        if (events_[i].time_us < 0.0) throw ConfigError("switch event at negative time");
        if (i > 0 && !(events_[i].time_us > events_[i - 1].time_us)) {
            throw ConfigError("switch event times must be strictly increasing");
        }
        if (events_[i].target_channel < 0) throw ConfigError("negative target channel");
    }
}

SwitchSchedule SwitchSchedule::alternating(std::span<const int> channels, double interval_us, double horizon_us) {
    if (channels.empty()) return SwitchSchedule({}, horizon_us);
    if (!(interval_us > 0.0)) throw ConfigError("switch interval must be positive");
    std::vector<SwitchEvent> events;
    const auto n = static_cast<long>(std::floor(horizon_us / interval_us + 1e-9));
    for (long k = 0; k < n; ++k) {
        events.push_back({static_cast<double>(k) * interval_us, channels[static_cast<std::size_t>(k) % channels.size()]});
    }
    return SwitchSchedule(std::move(events), horizon_us);
}

double SwitchSchedule::min_gap_us() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < events_.size(); ++i) gap = std::min(gap, events_[i].time_us - events_[i - 1].time_us);
    return gap;
}

double edfa_transient_factor(double t_since_on_us, double overshoot, double decay_us) {
    if (decay_us < 0.0) throw DomainError("EDFA decay time must be non-negative");
    if (t_since_on_us < 0.0) throw DomainError("time since turn-on must be non-negative");
    if (overshoot == 0.0) return 1.0;
    if (decay_us == 0.0) return t_since_on_us == 0.0 ? 1.0 + overshoot : 1.0;
    return 1.0 + overshoot * std::exp(-t_since_on_us / decay_us);
}

namespace {

double smoothstep(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * (3.0 - 2.0 * x);
}

// Root of 3x^2 - 2x^3 = 0.1 in (0, 0.5).
double smoothstep_x10() {
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (smoothstep(mid) < 0.1 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Transition {
    double time_us;
    int sign;  // +1 on, -1 off
};

}  // namespace

double smoothstep_duration(double rise_fall_us) {
    static const double x10 = smoothstep_x10();
    return rise_fall_us / (1.0 - 2.0 * x10);
}

PumpWaveform::PumpWaveform(double dt_us, std::vector<int> channels, std::vector<double> steady_mw,
                           std::vector<std::vector<double>> power_mw)
    : dt_us_(dt_us), channels_(std::move(channels)), steady_(std::move(steady_mw)), power_(std::move(power_mw)) {
    if (!(dt_us > 0.0)) throw DomainError("sample step must be positive");
    if (channels_.size() != steady_.size() || channels_.size() != power_.size()) {
        throw DomainError("waveform channel arrays disagree in length");
    }
    samples_ = power_.empty() ? 0 : power_.front().size();
    for (const auto& p : power_) {
        if (p.size() != samples_) throw DomainError("waveform channels differ in sample count");
    }
}

std::size_t PumpWaveform::slot(int channel) const {
    auto it = std::find(channels_.begin(), channels_.end(), channel);
    if (it == channels_.end()) throw ConfigError("waveform has no channel " + std::to_string(channel));
    return static_cast<std::size_t>(it - channels_.begin());
}

std::span<const double> PumpWaveform::power(int channel) const { return power_[slot(channel)]; }

double PumpWaveform::steady_power(int channel) const { return steady_[slot(channel)]; }

double PumpWaveform::power_at(int channel, double t_us) const {
    const auto& p = power_[slot(channel)];
    const double horizon = static_cast<double>(samples_ - 1) * dt_us_;
    if (samples_ == 0 || t_us < 0.0 || t_us > horizon + 1e-12) {
        throw RangeError("time " + std::to_string(t_us) + " us outside waveform");
    }
    const double pos = t_us / dt_us_;
    const auto k = std::min(static_cast<std::size_t>(pos), samples_ - 1);
    if (k + 1 >= samples_) return p[k];
    const double frac = pos - static_cast<double>(k);
    return p[k] + frac * (p[k + 1] - p[k]);
}

double default_dt_us(std::span<const PumpChannelConfig> configs) {
    double fastest = std::numeric_limits<double>::infinity();
    for (const auto& c : configs) fastest = std::min(fastest, c.shutter_rise_fall_us);
    if (!std::isfinite(fastest)) throw ConfigError("no pump channels configured");
    return fastest / 50.0;
}

PumpWaveform render_waveform(std::span<const PumpChannelConfig> configs, const SwitchSchedule& schedule,
                             double dt_us, const EdfaTransient& transient) {
    if (!(dt_us > 0.0)) throw DomainError("sample step must be positive");
    std::vector<int> ids;
    std::vector<double> steady;
    std::vector<std::vector<Transition>> transitions(configs.size());
    for (const auto& c : configs) {
        c.validate();
        if (std::find(ids.begin(), ids.end(), c.channel_index) != ids.end()) {
            throw ConfigError("duplicate pump channel " + std::to_string(c.channel_index));
        }
        if (dt_us > c.shutter_rise_fall_us / 10.0 + 1e-15) {
            throw DomainError("sample step too coarse to resolve the " + std::to_string(c.shutter_rise_fall_us) +
                              " us edges of channel " + std::to_string(c.channel_index));
        }
        ids.push_back(c.channel_index);
        steady.push_back(c.steady_power_mw);
    }
    auto slot_of = [&](int channel) -> std::size_t {
        auto it = std::find(ids.begin(), ids.end(), channel);
        if (it == ids.end()) throw ConfigError("schedule references unknown pump channel " + std::to_string(channel));
        return static_cast<std::size_t>(it - ids.begin());
    };

    int current = 0;
    for (const auto& e : schedule.events()) {
        if (e.target_channel == current) continue;
        if (e.target_channel != 0) slot_of(e.target_channel);  // validate before mutating
        if (current != 0) transitions[slot_of(current)].push_back({e.time_us, -1});
        if (e.target_channel != 0) transitions[slot_of(e.target_channel)].push_back({e.time_us, +1});
        current = e.target_channel;
    }

    const auto samples = static_cast<std::size_t>(std::floor(schedule.horizon_us() / dt_us + 1e-9)) + 1;
    std::vector<std::vector<double>> power(configs.size(), std::vector<double>(samples, 0.0));
    for (std::size_t ch = 0; ch < configs.size(); ++ch) {
        const double duration = smoothstep_duration(configs[ch].shutter_rise_fall_us);
        const auto& tr = transitions[ch];
        std::size_t next = 0;
        int settled = 0;                  // net count of edges that have finished
        std::deque<Transition> active;    // edges still in progress
        double last_on = -1.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const double t = static_cast<double>(k) * dt_us;
            while (next < tr.size() && tr[next].time_us <= t) {
                if (tr[next].sign > 0) last_on = tr[next].time_us;
                active.push_back(tr[next++]);
            }
            while (!active.empty() && t - active.front().time_us >= duration) {
                settled += active.front().sign;
                active.pop_front();
            }
            double level = settled;
            for (const auto& a : active) level += a.sign * smoothstep((t - a.time_us) / duration);
            level = std::clamp(level, 0.0, 1.0);
            if (level == 0.0) continue;
            const double factor = edfa_transient_factor(t - last_on, transient.overshoot, transient.decay_us);
            power[ch][k] = steady[ch] * level * factor;
        }
    }
    return PumpWaveform(dt_us, std::move(ids), std::move(steady), std::move(power));
}

namespace {

// Interpolated time of the first crossing of `level` at or after sample `from`.
std::optional<std::pair<double, std::size_t>> crossing(std::span<const double> p, double dt, std::size_t from,
                                                        double level, bool upward) {
    for (std::size_t k = std::max<std::size_t>(from, 1); k < p.size(); ++k) {
        const bool hit = upward ? (p[k - 1] < level && p[k] >= level) : (p[k - 1] > level && p[k] <= level);
        if (hit) {
            const double frac = (level - p[k - 1]) / (p[k] - p[k - 1]);
            return std::make_pair((static_cast<double>(k - 1) + frac) * dt, k);
        }
    }
    return std::nullopt;
}

}  // namespace

RiseFall measure_rise_fall(const PumpWaveform& waveform, int channel) {
    const auto p = waveform.power(channel);
    const double steady = waveform.steady_power(channel);
    const double lo = 0.1 * steady;
    const double hi = 0.9 * steady;
    const double dt = waveform.dt_us();

    const auto r10 = crossing(p, dt, 0, lo, true);
    const auto r90 = r10 ? crossing(p, dt, r10->second, hi, true) : std::nullopt;
    const auto f90 = r90 ? crossing(p, dt, r90->second, hi, false) : std::nullopt;
    const auto f10 = f90 ? crossing(p, dt, f90->second, lo, false) : std::nullopt;
    if (!f10) throw MeasurementError("no complete 10-90 % on/off cycle on channel " + std::to_string(channel));
    return {r90->first - r10->first, f10->first - f90->first};
}

std::vector<double> plateau_durations(const PumpWaveform& waveform, int channel, double fraction) {
    const auto p = waveform.power(channel);
    const double level = fraction * waveform.steady_power(channel);
    std::vector<double> runs;
    std::size_t start = 0;
    bool inside = false;
    for (std::size_t k = 0; k <= p.size(); ++k) {
        const bool above = k < p.size() && p[k] >= level;
        if (above && !inside) {
            start = k;
            inside = true;
        } else if (!above && inside) {
            runs.push_back(static_cast<double>(k - 1 - start) * waveform.dt_us());
            inside = false;
        }
    }
    return runs;
}

double instantaneous_efficiency(const PumpWaveform& waveform, int channel, const ConversionDevice& device,
                                double t_us) {
    const auto& cal = device.channel(channel);
    return conversion_efficiency(cal.a, cal.b_per_mw, waveform.power_at(channel, t_us));
}

double min_switch_interval(std::span<const PumpChannelConfig> configs) {
    if (configs.empty()) throw ConfigError("no pump channels configured");
    double worst = 0.0;
    for (const auto& c : configs) worst = std::max(worst, c.shutter_rise_fall_us);
    return worst;
}

std::vector<int> channels_above(const PumpWaveform& waveform, std::size_t k, double fraction) {
    std::vector<int> out;
    for (int ch : waveform.channels()) {
        if (waveform.power(ch)[k] > fraction * waveform.steady_power(ch)) out.push_back(ch);
    }
    return out;
}

std::string waveform_csv(const PumpWaveform& waveform) {
    std::ostringstream os;
    os << "t_us";
    for (int ch : waveform.channels()) os << ",p_ch" << ch << "_mw";
    os << '\n';
    char buf[64];
    for (std::size_t k = 0; k < waveform.sample_count(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6f", waveform.time_us(k));
        os << buf;
        for (int ch : waveform.channels()) {
            std::snprintf(buf, sizeof buf, ",%.9g", waveform.power(ch)[k]);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace csqfc
