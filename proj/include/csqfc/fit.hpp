#ifndef CSQFC_FIT_HPP
#define CSQFC_FIT_HPP

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace csqfc {

struct EfficiencySample {
    double pump_power_mw = 0.0;
    double efficiency = 0.0;
    double std_err = 0.0;
};

// Measured eta(P) points for one pump channel. Powers strictly increase and
// efficiencies lie in [0, 1].
class EfficiencyCurve {
public:
    EfficiencyCurve() = default;
    explicit EfficiencyCurve(std::vector<EfficiencySample> samples);

    std::span<const EfficiencySample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

private:
    std::vector<EfficiencySample> samples_;
};

// Noise-free curve A sin^2(sqrt(B P)) sampled at `powers_mw`.
EfficiencyCurve generate_curve(double a, double b_per_mw, std::span<const double> powers_mw);

struct FitResult {
    double a = 0.0;
    double b_per_mw = 0.0;
    double rms_residual = 0.0;
    int iterations = 0;
};

class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, FitResult best) : std::runtime_error(what), best_(best) {}
    const FitResult& best_iterate() const { return best_; }

private:
    FitResult best_;
};

struct FitOptions {
    // Starting values of B; A is seeded by linear least squares at each.
    std::vector<double> b_starts{0.005, 0.01, 0.02, 0.04};
    int max_iterations = 200;
    double step_tolerance = 1e-9;
};

// Least-squares fit of (A, B) to A sin^2(sqrt(B P)) by damped Gauss-Newton
// (Levenberg-Marquardt) from several starting B values. The objective has a
// local minimum for each branch of the sine, so the multi-start keeps the
// lowest residual among the runs that converged.
FitResult fit_efficiency_curve(const EfficiencyCurve& curve, const FitOptions& options = {});

}  // namespace csqfc

#endif
