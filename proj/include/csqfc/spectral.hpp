#ifndef CSQFC_SPECTRAL_HPP
#define CSQFC_SPECTRAL_HPP

// Frequency bookkeeping on the DWDM grid, the pump-power efficiency law and
// the phase-matching envelope of the converter.
//
// All frequencies are ordinary (not angular) frequencies stored as integer GHz
// so that energy-conservation sums are exact. Continuous values appear only
// inside the efficiency formulas.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>

namespace csqfc {

// Optical frequency in whole GHz; always positive.
class Frequency {
public:
    constexpr Frequency() = default;
    explicit Frequency(std::int64_t ghz);

    constexpr std::int64_t ghz() const { return ghz_; }
    constexpr double thz() const { return static_cast<double>(ghz_) * 1e-3; }

    friend constexpr auto operator<=>(Frequency, Frequency) = default;

private:
    std::int64_t ghz_ = 1;
};

// Signed difference a - b in GHz.
constexpr std::int64_t detuning_ghz(Frequency a, Frequency b) { return a.ghz() - b.ghz(); }

// Fixed-spacing channel grid. Channel 1 sits at `base`; `direction` is +1 when
// frequency grows with the channel index and -1 when it falls (as on a DeMux
// fed by a difference-frequency process).
struct ChannelPlan {
    Frequency base;
    std::int64_t spacing_ghz = 25;
    int count = 1;
    int direction = +1;

    void validate() const;
};

Frequency channel_frequency(const ChannelPlan& plan, int index);

// Inverse of channel_frequency; empty when `f` is not on the grid.
std::optional<int> frequency_to_channel(const ChannelPlan& plan, Frequency f);

// Difference-frequency output: signal - pump. Throws DomainError when the
// difference is not positive.
Frequency converted_frequency(Frequency signal, Frequency pump);

// Per-pump-channel constants of the law eta(P) = A sin^2(sqrt(B P)).
struct ChannelCalibration {
    double a = 0.0;        // peak efficiency, (0, 1]
    double b_per_mw = 0.0;  // mW^-1, > 0
};

struct ConversionDevice {
    double length_mm = 40.0;
    Frequency pm_pump;                     // pump frequency with zero phase mismatch
    double beta_rad_per_mm_ghz = 0.0;      // slope of the linear phase-mismatch model
    std::map<int, ChannelCalibration> calibration;  // keyed by pump channel index

    void validate() const;

    // Largest calibrated A; the amplitude of the phase-matching envelope.
    double envelope_peak() const;

    const ChannelCalibration& channel(int pump_channel) const;
};

// Linearized phase mismatch in rad/mm: beta * (pump - pm_pump).
double phase_mismatch(const ConversionDevice& device, Frequency pump);

// sin(x)/x with sinc(0) = 1.
double sinc(double x);

// envelope_peak * sinc^2(dk L / 2).
double envelope_efficiency(const ConversionDevice& device, Frequency pump);

// A sin^2(sqrt(B P)); throws DomainError for P < 0.
double conversion_efficiency(double a, double b_per_mw, double power_mw);

// (pi/2)^2 / B, the first maximum of conversion_efficiency.
double optimal_pump_power(double b_per_mw);

// floor((high - low) / spacing), zero for an empty band.
int selectable_channel_count(Frequency band_low, Frequency band_high, std::int64_t spacing_ghz);

// Smallest positive x with sinc^2(x) = retention, for retention in (0, 1].
double sinc2_half_width(double retention);

// Largest beta for which the envelope keeps at least `retention` of its peak
// at a detuning of `max_detuning_ghz` from the phase-matched pump.
double calibrate_beta(double length_mm, std::int64_t max_detuning_ghz, double retention);

// Contiguous pump band around the phase-matched frequency where the envelope
// stays at or above `threshold`, searched on a `step_ghz` grid inside
// [scan_low, scan_high]. Empty when even the phase-matched point is below.
struct Band {
    Frequency low;
    Frequency high;
};
std::optional<Band> usable_band(const ConversionDevice& device, Frequency scan_low, Frequency scan_high,
                                std::int64_t step_ghz, double threshold);

}  // namespace csqfc

#endif
