#include "csqfc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "csqfc/errors.hpp"

namespace csqfc {

Frequency::Frequency(std::int64_t ghz) : ghz_(ghz) {
    if (ghz <= 0) {
        throw DomainError("frequency must be positive, got " + std::to_string(ghz) + " GHz");
    }
}

void ChannelPlan::validate() const {
    if (spacing_ghz <= 0) throw ConfigError("channel spacing must be positive");
    if (count < 1) throw ConfigError("channel count must be at least 1");
    if (direction != 1 && direction != -1) throw ConfigError("channel direction must be +1 or -1");
    const std::int64_t last = base.ghz() + direction * static_cast<std::int64_t>(count - 1) * spacing_ghz;
    if (last <= 0) throw ConfigError("channel plan runs below zero frequency");
}

Frequency channel_frequency(const ChannelPlan& plan, int index) {
    if (index < 1 || index > plan.count) {
        throw RangeError("channel " + std::to_string(index) + " outside 1.." + std::to_string(plan.count));
    }
    return Frequency(plan.base.ghz() + plan.direction * static_cast<std::int64_t>(index - 1) * plan.spacing_ghz);
}

std::optional<int> frequency_to_channel(const ChannelPlan& plan, Frequency f) {
    const std::int64_t offset = plan.direction * (f.ghz() - plan.base.ghz());
    if (offset < 0 || offset % plan.spacing_ghz != 0) return std::nullopt;
    const std::int64_t index = offset / plan.spacing_ghz + 1;
    if (index > plan.count) return std::nullopt;
    return static_cast<int>(index);
}

Frequency converted_frequency(Frequency signal, Frequency pump) {
    if (signal <= pump) {
        throw DomainError("signal " + std::to_string(signal.ghz()) + " GHz does not exceed pump " +
                          std::to_string(pump.ghz()) + " GHz");
    }
    return Frequency(signal.ghz() - pump.ghz());
}

void ConversionDevice::validate() const {
    if (!(length_mm > 0.0)) throw ConfigError("device length must be positive");
    if (!std::isfinite(beta_rad_per_mm_ghz)) throw ConfigError("beta must be finite");
    for (const auto& [index, cal] : calibration) {
        if (!(cal.a > 0.0 && cal.a <= 1.0)) {
            throw ConfigError("channel " + std::to_string(index) + ": A must lie in (0, 1]");
        }
        if (!(cal.b_per_mw > 0.0)) {
            throw ConfigError("channel " + std::to_string(index) + ": B must be positive");
        }
    }
}

double ConversionDevice::envelope_peak() const {
    if (calibration.empty()) throw ConfigError("device has no calibrated channels");
    double peak = 0.0;
    for (const auto& [index, cal] : calibration) peak = std::max(peak, cal.a);
    return peak;
}

const ChannelCalibration& ConversionDevice::channel(int pump_channel) const {
    auto it = calibration.find(pump_channel);
    if (it == calibration.end()) {
        throw ConfigError("no calibration for pump channel " + std::to_string(pump_channel));
    }
    return it->second;
}

double phase_mismatch(const ConversionDevice& device, Frequency pump) {
    return device.beta_rad_per_mm_ghz * static_cast<double>(detuning_ghz(pump, device.pm_pump));
}

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double envelope_efficiency(const ConversionDevice& device, Frequency pump) {
    const double s = sinc(0.5 * phase_mismatch(device, pump) * device.length_mm);
    return device.envelope_peak() * s * s;
}

double conversion_efficiency(double a, double b_per_mw, double power_mw) {
    if (power_mw < 0.0) throw DomainError("pump power must be non-negative");
    const double s = std::sin(std::sqrt(b_per_mw * power_mw));
    return a * s * s;
}

double optimal_pump_power(double b_per_mw) {
    if (!(b_per_mw > 0.0)) throw DomainError("B must be positive");
    constexpr double half_pi = std::numbers::pi / 2.0;
    return half_pi * half_pi / b_per_mw;
}

int selectable_channel_count(Frequency band_low, Frequency band_high, std::int64_t spacing_ghz) {
    if (spacing_ghz <= 0) throw DomainError("spacing must be positive");
    const std::int64_t width = band_high.ghz() - band_low.ghz();
    if (width <= 0) return 0;
    return static_cast<int>(width / spacing_ghz);
}

double sinc2_half_width(double retention) {
    if (!(retention > 0.0 && retention <= 1.0)) {
        throw DomainError("retention must lie in (0, 1], got " + std::to_string(retention));
    }
    if (retention == 1.0) return 0.0;
    // sinc^2 decreases monotonically on [0, pi]; bisect.
    double lo = 0.0;
    double hi = std::numbers::pi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double s = sinc(mid);
        if (s * s > retention) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double calibrate_beta(double length_mm, std::int64_t max_detuning_ghz, double retention) {
    if (!(length_mm > 0.0)) throw DomainError("length must be positive");
    if (max_detuning_ghz <= 0) throw DomainError("detuning must be positive");
    const double x = sinc2_half_width(retention);
    return 2.0 * x / (length_mm * static_cast<double>(max_detuning_ghz));
}

std::optional<Band> usable_band(const ConversionDevice& device, Frequency scan_low, Frequency scan_high,
                                std::int64_t step_ghz, double threshold) {
    if (step_ghz <= 0) throw DomainError("scan step must be positive");
    if (scan_high < scan_low) return std::nullopt;
    const Frequency centre = std::clamp(device.pm_pump, scan_low, scan_high);
    if (envelope_efficiency(device, centre) < threshold) return std::nullopt;

    Frequency high = centre;
    for (std::int64_t f = centre.ghz() + step_ghz; f <= scan_high.ghz(); f += step_ghz) {
        if (envelope_efficiency(device, Frequency(f)) < threshold) break;
        high = Frequency(f);
    }
    Frequency low = centre;
    for (std::int64_t f = centre.ghz() - step_ghz; f >= scan_low.ghz(); f -= step_ghz) {
        if (envelope_efficiency(device, Frequency(f)) < threshold) break;
        low = Frequency(f);
    }
    return Band{low, high};
}

}  // namespace csqfc
