#ifndef CSQFC_PUMP_BANK_HPP
#define CSQFC_PUMP_BANK_HPP

// Time-domain model of the pump chain: per-channel lasers gated by shutters,
// multiplexed and amplified by an EDFA. Each channel's power is a linear
// superposition of smoothstep edges (so edges closer together than their own
// duration erode the plateau instead of overlapping into > 100 %), scaled by
// the steady power and an EDFA turn-on overshoot.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "csqfc/spectral.hpp"

namespace csqfc {

inline constexpr double kEdfaMaxPowerMw = 500.0;

struct PumpChannelConfig {
    int channel_index = 1;
    Frequency frequency;
    double steady_power_mw = 200.0;    // post-EDFA, (0, 500]
    double shutter_rise_fall_us = 0.5;  // 10-90 % edge duration

    void validate() const;
};

struct SwitchEvent {
    double time_us = 0.0;
    int target_channel = 0;
};

class SwitchSchedule {
public:
    SwitchSchedule() = default;
    SwitchSchedule(std::vector<SwitchEvent> events, double horizon_us);

    // Alternate between `channels` every `interval_us`, starting at t = 0.
    static SwitchSchedule alternating(std::span<const int> channels, double interval_us, double horizon_us);

    std::span<const SwitchEvent> events() const { return events_; }
    double horizon_us() const { return horizon_us_; }
    // Smallest gap between consecutive events; +inf with fewer than two.
    double min_gap_us() const;

private:
    std::vector<SwitchEvent> events_;
    double horizon_us_ = 0.0;
};

struct EdfaTransient {
    double overshoot = 0.5;
    double decay_us = 1.0;
};

// 1 + overshoot exp(-t / decay).
double edfa_transient_factor(double t_since_on_us, double overshoot, double decay_us);

// Full smoothstep duration whose 10 %-90 % crossing time equals `rise_fall_us`.
double smoothstep_duration(double rise_fall_us);

class PumpWaveform {
public:
    PumpWaveform(double dt_us, std::vector<int> channels, std::vector<double> steady_mw,
                 std::vector<std::vector<double>> power_mw);

    double dt_us() const { return dt_us_; }
    std::size_t sample_count() const { return samples_; }
    double time_us(std::size_t k) const { return static_cast<double>(k) * dt_us_; }
    std::span<const int> channels() const { return channels_; }

    std::span<const double> power(int channel) const;
    double steady_power(int channel) const;
    // Linear interpolation; throws RangeError outside [0, horizon].
    double power_at(int channel, double t_us) const;

    friend bool operator==(const PumpWaveform&, const PumpWaveform&) = default;

private:
    std::size_t slot(int channel) const;

    double dt_us_;
    std::size_t samples_ = 0;
    std::vector<int> channels_;
    std::vector<double> steady_;
    std::vector<std::vector<double>> power_;
};

// Requires dt <= min rise_fall / 10. A target of 0 in the schedule turns all
// pumps off; any other unknown target is a ConfigError.
PumpWaveform render_waveform(std::span<const PumpChannelConfig> configs, const SwitchSchedule& schedule,
                             double dt_us, const EdfaTransient& transient = {});

// Default sample step: rise_fall / 50 of the fastest channel.
double default_dt_us(std::span<const PumpChannelConfig> configs);

struct RiseFall {
    double rise_us = 0.0;
    double fall_us = 0.0;
};

// First complete 10->90 % rising edge and 90->10 % falling edge, with levels
// relative to the channel's steady power and crossings linearly interpolated.
RiseFall measure_rise_fall(const PumpWaveform& waveform, int channel);

// Durations of the maximal runs where power >= fraction * steady power.
std::vector<double> plateau_durations(const PumpWaveform& waveform, int channel, double fraction);

double instantaneous_efficiency(const PumpWaveform& waveform, int channel, const ConversionDevice& device,
                                double t_us);

// Slowest channel's rise/fall: the shortest schedule gap for which the
// plateaus still reach 90 % of steady power.
double min_switch_interval(std::span<const PumpChannelConfig> configs);

// Channels above `fraction` of their steady power at sample k.
std::vector<int> channels_above(const PumpWaveform& waveform, std::size_t k, double fraction);

std::string waveform_csv(const PumpWaveform& waveform);

}  // namespace csqfc

#endif
