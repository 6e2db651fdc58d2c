#include "csqfc/qfc_transform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "csqfc/errors.hpp"
#include "oracles.hpp"

using namespace csqfc;
using std::numbers::pi;

namespace {

TwoModeFockState random_state(std::mt19937_64& rng, int cutoff) {
    std::normal_distribution<double> g;
    TwoModeFockState s(cutoff);
    for (int ns = 0; ns <= cutoff; ++ns)
        for (int nc = 0; ns + nc <= cutoff; ++nc) s.set_amplitude(ns, nc, {g(rng), g(rng)});
    s.normalize();
    return s;
}

}  // namespace

TEST(ModeCoefficients, LimitingSettings) {
    auto full = mode_transform_coeffs({pi, 0.0});
    EXPECT_NEAR(std::abs(full.signal - Complex(1.0, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(full.converted), 0.0, 1e-15);

    for (double phi : {0.0, 1.0, 4.0}) {
        auto none = mode_transform_coeffs({0.0, phi});
        EXPECT_EQ(std::abs(none.signal), 0.0);
        EXPECT_EQ(none.converted, Complex(1.0, 0.0));
    }
    auto half = mode_transform_coeffs({pi / 2, pi});
    EXPECT_NEAR(std::abs(half.signal), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(half.converted), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::norm(half.signal) + std::norm(half.converted), 1.0, 1e-15);
}

TEST(ConversionProbability, Values) {
    EXPECT_NEAR(conversion_probability(pi), 1.0, 1e-15);
    EXPECT_EQ(conversion_probability(0.0), 0.0);
    EXPECT_NEAR(conversion_probability(pi / 2), 0.5, 1e-15);
}

TEST(ThetaFromPower, OptimumGivesPi) {
    EXPECT_NEAR(theta_from_power(0.013, (pi / 2) * (pi / 2) / 0.013), pi, 1e-14);
    EXPECT_THROW(theta_from_power(0.013, -1.0), DomainError);
}

TEST(FockState, TruncationAndNormalization) {
    TwoModeFockState s(3);
    EXPECT_EQ(s.amplitude(0, 0), Complex(1.0));
    EXPECT_THROW(s.set_amplitude(2, 2, 1.0), RangeError);
    EXPECT_THROW(s.amplitude(4, 0), RangeError);
    EXPECT_THROW(TwoModeFockState(0), RangeError);
    s.set_amplitude(1, 2, 1.0);
    s.normalize();
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
    const auto pc = s.converted_distribution();
    EXPECT_NEAR(pc[0] + pc[2], 1.0, 1e-15);
    const auto pt = s.total_distribution();
    EXPECT_NEAR(pt[0], 0.5, 1e-15);
    EXPECT_NEAR(pt[3], 0.5, 1e-15);
}

TEST(ApplyQfc, DeterministicConversionOfOnePhoton) {
    const auto out = apply_qfc(TwoModeFockState::basis(1, 0), {pi, 0.0});
    EXPECT_NEAR(std::norm(out.amplitude(0, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::norm(out.amplitude(1, 0)), 0.0, 1e-15);
}

TEST(ApplyQfc, ZeroThetaIsIdentity) {
    std::mt19937_64 rng(1);
    const auto s = random_state(rng, 4);
    EXPECT_LT(max_abs_difference(apply_qfc(s, {0.0, 2.0}), s), 1e-15);
}

TEST(ApplyQfc, OnePhotonProbabilityMatchesTwoByTwoOracle) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> th(0.0, pi), ph(0.0, 2 * pi);
    for (int i = 0; i < 200; ++i) {
        const double theta = th(rng), phi = ph(rng);
        const auto out = apply_qfc(TwoModeFockState::basis(1, 0), {theta, phi});
        EXPECT_NEAR(out.converted_distribution()[1], oracle::one_photon_conversion(theta, phi), 1e-12);
        EXPECT_NEAR(out.converted_distribution()[1], std::pow(std::sin(theta / 2), 2), 1e-12);
    }
}

TEST(ApplyQfc, MatchesExponentiatedGeneratorInEverySector) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.0, pi), ph(0.0, 2 * pi);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = th(rng), phi = ph(rng);
        const auto in = random_state(rng, 4);
        const auto u = oracle::beamsplitter_propagator(4, theta, phi);
        oracle::FockBasis basis(4);
        const auto out = apply_qfc(in, {theta, phi});
        for (std::size_t r = 0; r < basis.states.size(); ++r) {
            Complex expect{};
            for (std::size_t c = 0; c < basis.states.size(); ++c) {
                expect += u[r][c] * in.amplitude(basis.states[c].first, basis.states[c].second);
            }
            EXPECT_NEAR(std::abs(out.amplitude(basis.states[r].first, basis.states[r].second) - expect), 0.0, 1e-12);
        }
    }
}

TEST(ApplyQfc, HongOuMandelSuppression) {
    // |1,1> through a balanced split never leaves one photon in each mode.
    const auto out = apply_qfc(TwoModeFockState::basis(1, 1), {pi / 2, 0.3});
    EXPECT_NEAR(std::norm(out.amplitude(1, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::norm(out.amplitude(2, 0)) + std::norm(out.amplitude(0, 2)), 1.0, 1e-14);
}

TEST(ApplyQfc, NormPreservedAndInverted) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> th(0.0, pi), ph(0.0, 2 * pi);
    for (int i = 0; i < 100; ++i) {
        const QfcSetting s{th(rng), ph(rng)};
        const auto in = random_state(rng, 3);
        const auto out = apply_qfc(in, s);
        EXPECT_NEAR(out.norm_squared(), 1.0, 1e-12);
        EXPECT_LT(max_abs_difference(apply_qfc(out, inverse_setting(s)), in), 1e-10);
        const auto pin = in.total_distribution(), pout = out.total_distribution();
        for (std::size_t n = 0; n < pin.size(); ++n) EXPECT_NEAR(pin[n], pout[n], 1e-12);
    }
}

TEST(ApplyQfc, CutoffMismatchIsAShapeError) {
    EXPECT_THROW(max_abs_difference(TwoModeFockState(2), TwoModeFockState(3)), RangeError);
}

TEST(InverseSetting, WrapsPhase) {
    const auto inv = inverse_setting({1.0, 1.5 * pi, 3, 2});
    EXPECT_NEAR(inv.phi, 0.5 * pi, 1e-15);
    EXPECT_EQ(inv.round, 3);
    EXPECT_EQ(inv.pump_channel, 2);
}

TEST(PumpGuard, ExactlyOnePump) {
    const std::vector<int> one{3}, two{3, 4}, none{};
    EXPECT_TRUE(simultaneous_pump_guard(one).ok);
    const auto bad = simultaneous_pump_guard(two);
    EXPECT_FALSE(bad.ok);
    EXPECT_EQ(bad.active, two);
    EXPECT_FALSE(simultaneous_pump_guard(none).ok);
    EXPECT_TRUE(simultaneous_pump_guard(none).active.empty());
}
