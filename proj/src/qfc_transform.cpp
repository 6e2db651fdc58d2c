#include "csqfc/qfc_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "csqfc/errors.hpp"

namespace csqfc {

double theta_from_power(double b_per_mw, double power_mw) {
    if (power_mw < 0.0) throw DomainError("pump power must be non-negative");
    if (!(b_per_mw > 0.0)) throw DomainError("B must be positive");
    return 2.0 * std::sqrt(b_per_mw * power_mw);
}

ModeCoefficients mode_transform_coeffs(const QfcSetting& setting) {
    const double half = 0.5 * setting.theta;
    return {std::polar(std::sin(half), -setting.phi), Complex(std::cos(half), 0.0)};
}

double conversion_probability(double theta) {
    const double s = std::sin(0.5 * theta);
    return s * s;
}

TwoModeFockState::TwoModeFockState(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw RangeError("Fock cutoff must be at least 1");
    amp_.assign(static_cast<std::size_t>((cutoff + 1) * (cutoff + 1)), Complex{});
    amp_[0] = 1.0;
}

TwoModeFockState TwoModeFockState::basis(int n_signal, int n_converted, int cutoff) {
    TwoModeFockState s(cutoff);
    s.amp_[0] = 0.0;
    s.set_amplitude(n_signal, n_converted, 1.0);
    return s;
}

std::size_t TwoModeFockState::index(int n_signal, int n_converted) const {
    if (n_signal < 0 || n_converted < 0 || n_signal + n_converted > cutoff_) {
        throw RangeError("|" + std::to_string(n_signal) + "," + std::to_string(n_converted) +
                         "> exceeds total photon cutoff " + std::to_string(cutoff_));
    }
    return static_cast<std::size_t>(n_signal * (cutoff_ + 1) + n_converted);
}

Complex TwoModeFockState::amplitude(int n_signal, int n_converted) const {
    return amp_[index(n_signal, n_converted)];
}

void TwoModeFockState::set_amplitude(int n_signal, int n_converted, Complex value) {
    amp_[index(n_signal, n_converted)] = value;
}

double TwoModeFockState::norm_squared() const {
    double total = 0.0;
    for (const Complex& c : amp_) total += std::norm(c);
    return total;
}

void TwoModeFockState::normalize() {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw DomainError("cannot normalize the zero vector");
    for (Complex& c : amp_) c /= n;
}

std::vector<double> TwoModeFockState::converted_distribution() const {
    std::vector<double> p(static_cast<std::size_t>(cutoff_ + 1), 0.0);
    for (int ns = 0; ns <= cutoff_; ++ns) {
        for (int nc = 0; ns + nc <= cutoff_; ++nc) p[static_cast<std::size_t>(nc)] += std::norm(amplitude(ns, nc));
    }
    return p;
}

std::vector<double> TwoModeFockState::total_distribution() const {
    std::vector<double> p(static_cast<std::size_t>(cutoff_ + 1), 0.0);
    for (int ns = 0; ns <= cutoff_; ++ns) {
        for (int nc = 0; ns + nc <= cutoff_; ++nc) {
            p[static_cast<std::size_t>(ns + nc)] += std::norm(amplitude(ns, nc));
        }
    }
    return p;
}

double max_abs_difference(const TwoModeFockState& a, const TwoModeFockState& b) {
    if (a.cutoff() != b.cutoff()) throw RangeError("cutoff mismatch");
    double worst = 0.0;
    for (int ns = 0; ns <= a.cutoff(); ++ns) {
        for (int nc = 0; ns + nc <= a.cutoff(); ++nc) {
            worst = std::max(worst, std::abs(a.amplitude(ns, nc) - b.amplitude(ns, nc)));
        }
    }
    return worst;
}

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

std::vector<Complex> powers(Complex base, int count) {
    std::vector<Complex> out(static_cast<std::size_t>(count + 1));
    out[0] = 1.0;
    for (int i = 1; i <= count; ++i) out[static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(i - 1)] * base;
    return out;
}

}  // namespace

TwoModeFockState apply_qfc(const TwoModeFockState& state, const QfcSetting& setting) {
    const int cutoff = state.cutoff();
    const double half = 0.5 * setting.theta;
    const double c = std::cos(half);
    const double s = std::sin(half);

    // Creation operators map as a_k^dag -> sum_j M_jk a_j^dag with
    // M = [[c, -e^{i phi} s], [e^{-i phi} s, c]] in (signal, converted) order.
    const auto x = powers(Complex(c, 0.0), cutoff);                  // a_s^dag -> a_s^dag
    const auto y = powers(std::polar(s, -setting.phi), cutoff);      // a_s^dag -> a_c^dag
    const auto z = powers(-std::polar(s, setting.phi), cutoff);      // a_c^dag -> a_s^dag
    const auto w = powers(Complex(c, 0.0), cutoff);                  // a_c^dag -> a_c^dag

    std::vector<double> fact(static_cast<std::size_t>(cutoff + 1), 1.0);
    for (int i = 1; i <= cutoff; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;
    auto at = [](const std::vector<Complex>& v, int i) { return v[static_cast<std::size_t>(i)]; };
    auto f = [&](int i) { return fact[static_cast<std::size_t>(i)]; };

    TwoModeFockState out(cutoff);
    out.set_amplitude(0, 0, 0.0);
    for (int n = 0; n <= cutoff; ++n) {
        for (int k = 0; k <= n; ++k) {  // input |k, n-k>
            const Complex in = state.amplitude(k, n - k);
            if (in == Complex{}) continue;
            const double in_norm = std::sqrt(f(k) * f(n - k));
            for (int m = 0; m <= n; ++m) {  // output |m, n-m>
                Complex coef{};
                for (int p = std::max(0, m - (n - k)); p <= std::min(k, m); ++p) {
                    const int q = m - p;
                    coef += binomial(k, p) * binomial(n - k, q) * at(x, p) * at(y, k - p) * at(z, q) *
                            at(w, n - k - q);
                }
                const double out_norm = std::sqrt(f(m) * f(n - m));
                out.set_amplitude(m, n - m, out.amplitude(m, n - m) + in * coef * (out_norm / in_norm));
            }
        }
    }
    return out;
}

QfcSetting inverse_setting(const QfcSetting& setting) {
    QfcSetting inv = setting;
    inv.phi = std::fmod(setting.phi + std::numbers::pi, 2.0 * std::numbers::pi);
    return inv;
}

PumpGuardResult simultaneous_pump_guard(std::span<const int> active_pumps) {
    return {active_pumps.size() == 1, std::vector<int>(active_pumps.begin(), active_pumps.end())};
}

}  // namespace csqfc
