#include "csqfc/fit.hpp"

#include <cmath>
#include <limits>

#include "csqfc/errors.hpp"
#include "csqfc/spectral.hpp"

namespace csqfc {

EfficiencyCurve::EfficiencyCurve(std::vector<EfficiencySample> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!(s.pump_power_mw >= 0.0)) throw DomainError("pump power must be non-negative");
        if (!(s.efficiency >= 0.0 && s.efficiency <= 1.0)) throw DomainError("efficiency outside [0, 1]");
        if (i > 0 && !(s.pump_power_mw > samples_[i - 1].pump_power_mw)) {
            throw DomainError("pump powers must be strictly increasing");
        }
    }
}

EfficiencyCurve generate_curve(double a, double b_per_mw, std::span<const double> powers_mw) {
    std::vector<EfficiencySample> samples;
    samples.reserve(powers_mw.size());
    for (double p : powers_mw) samples.push_back({p, conversion_efficiency(a, b_per_mw, p), 0.0});
    return EfficiencyCurve(std::move(samples));
}

namespace {

double sum_sq_residual(std::span<const EfficiencySample> s, double a, double b) {
    double total = 0.0;
    for (const auto& x : s) {
        const double r = x.efficiency - conversion_efficiency(a, b, x.pump_power_mw);
        total += r * r;
    }
    return total;
}

struct Run {
    FitResult result;
    double cost = std::numeric_limits<double>::infinity();
    bool converged = false;
};

Run levenberg_marquardt(std::span<const EfficiencySample> s, double b0, const FitOptions& opt) {
    // Seed A by the linear least-squares optimum at fixed B.
    double num = 0.0;
    double den = 0.0;
    for (const auto& x : s) {
        const double q = conversion_efficiency(1.0, b0, x.pump_power_mw);
        num += x.efficiency * q;
        den += q * q;
    }
    Run run;
    if (den <= 0.0) return run;

    double a = num / den;
    double b = b0;
    double cost = sum_sq_residual(s, a, b);
    double lambda = 1e-3;

    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        // Normal equations J^T J and J^T r for the 2-parameter model.
        double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
        for (const auto& x : s) {
            const double u = std::sqrt(b * x.pump_power_mw);
            const double sn = std::sin(u);
            const double d_a = sn * sn;
            // d/dB of A sin^2(sqrt(B P)) = A sin(2u) sqrt(P) / (2 sqrt(B))
            const double d_b = a * std::sin(2.0 * u) * std::sqrt(x.pump_power_mw) / (2.0 * std::sqrt(b));
            const double r = x.efficiency - a * d_a;
            jaa += d_a * d_a;
            jab += d_a * d_b;
            jbb += d_b * d_b;
            ga += d_a * r;
            gb += d_b * r;
        }

        bool accepted = false;
        double step_a = 0.0, step_b = 0.0;
        while (!accepted && lambda < 1e20) {
            const double m00 = jaa * (1.0 + lambda);
            const double m11 = jbb * (1.0 + lambda);
            const double det = m00 * m11 - jab * jab;
            if (!(std::abs(det) > 0.0)) {
                lambda *= 10.0;
                continue;
            }
            step_a = (m11 * ga - jab * gb) / det;
            step_b = (m00 * gb - jab * ga) / det;
            const double na = a + step_a;
            const double nb = b + step_b;
            const double ncost = nb > 0.0 ? sum_sq_residual(s, na, nb) : std::numeric_limits<double>::infinity();
            if (ncost <= cost) {
                a = na;
                b = nb;
                cost = ncost;
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            // No descent direction left: stationary to machine precision.
            run.converged = true;
            break;
        }
        const double rel = std::max(std::abs(step_a) / std::max(std::abs(a), 1e-300),
                                    std::abs(step_b) / b);
        if (rel < opt.step_tolerance || cost == 0.0) {
            run.converged = true;
            ++iter;
            break;
        }
    }

    run.cost = cost;
    run.result = {a, b, std::sqrt(cost / static_cast<double>(s.size())), iter};
    return run;
}

}  // namespace

FitResult fit_efficiency_curve(const EfficiencyCurve& curve, const FitOptions& options) {
    const auto s = curve.samples();
    if (s.size() < 4) {
        throw FitError("at least 4 samples are needed, got " + std::to_string(s.size()), {});
    }
    bool any_signal = false;
    for (const auto& x : s) any_signal = any_signal || x.efficiency > 0.0;
    if (!any_signal) throw FitError("all efficiencies are zero", {});

    Run best_converged;
    Run best_any;
    for (double b0 : options.b_starts) {
        Run run = levenberg_marquardt(s, b0, options);
        if (run.cost < best_any.cost) best_any = run;
        if (run.converged && run.cost < best_converged.cost) best_converged = run;
    }
    if (!best_converged.converged) {
        throw FitError("no start converged within " + std::to_string(options.max_iterations) + " iterations",
                       best_any.result);
    }
    return best_converged.result;
}

}  // namespace csqfc
