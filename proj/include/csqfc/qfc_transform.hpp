#ifndef CSQFC_QFC_TRANSFORM_HPP
#define CSQFC_QFC_TRANSFORM_HPP

// One conversion round as a two-mode unitary between the signal mode and the
// converted mode selected by the active pump:
//
//   b_c = e^{-i phi} sin(theta/2) a_s + cos(theta/2) a_c
//   b_s = cos(theta/2) a_s - e^{+i phi} sin(theta/2) a_c
//
// The second row completes the unitary with the usual beamsplitter sign. The
// peak efficiency A < 1 of a real device is a loss applied outside this map.

#include <complex>
#include <span>
#include <vector>

namespace csqfc {

using Complex = std::complex<double>;

struct QfcSetting {
    double theta = 0.0;  // [0, pi]; theta = pi converts deterministically
    double phi = 0.0;    // pump phase
    int round = 1;
    int pump_channel = 1;
};

// theta = 2 sqrt(B P), so that sin^2(theta/2) follows the efficiency law.
double theta_from_power(double b_per_mw, double power_mw);

struct ModeCoefficients {
    Complex signal;     // weight of a_s in b_c
    Complex converted;  // weight of a_c in b_c
};

ModeCoefficients mode_transform_coeffs(const QfcSetting& setting);

// sin^2(theta/2).
double conversion_probability(double theta);

// Joint photon-number amplitudes of (signal, converted), truncated to a total
// photon number <= cutoff.
class TwoModeFockState {
public:
    static constexpr int kDefaultCutoff = 4;

    explicit TwoModeFockState(int cutoff = kDefaultCutoff);

    // |n_s, n_c>
    static TwoModeFockState basis(int n_signal, int n_converted, int cutoff = kDefaultCutoff);

    int cutoff() const { return cutoff_; }

    Complex amplitude(int n_signal, int n_converted) const;
    void set_amplitude(int n_signal, int n_converted, Complex value);

    double norm_squared() const;
    void normalize();

    // Probability distribution of the converted-mode photon number.
    std::vector<double> converted_distribution() const;
    // Probability distribution of the total photon number.
    std::vector<double> total_distribution() const;

    friend bool operator==(const TwoModeFockState&, const TwoModeFockState&) = default;

private:
    std::size_t index(int n_signal, int n_converted) const;

    int cutoff_;
    std::vector<Complex> amp_;
};

// Maximum absolute amplitude difference; throws RangeError on cutoff mismatch.
double max_abs_difference(const TwoModeFockState& a, const TwoModeFockState& b);

// Applies the round's unitary sector by sector (photon number is conserved).
TwoModeFockState apply_qfc(const TwoModeFockState& state, const QfcSetting& setting);

// The setting that undoes `setting`: same theta, phi + pi.
QfcSetting inverse_setting(const QfcSetting& setting);

// Exactly one pump must drive a conversion round; two or more pumps couple
// several signal/converted mode pairs and the round is no longer a
// single-mode frequency translation.
struct PumpGuardResult {
    bool ok = false;
    std::vector<int> active;
};

PumpGuardResult simultaneous_pump_guard(std::span<const int> active_pumps);

}  // namespace csqfc

#endif
