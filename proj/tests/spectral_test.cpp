#include "csqfc/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "csqfc/errors.hpp"

using namespace csqfc;

namespace {

ChannelPlan pump_plan() { return {Frequency(189383), 25, 7, +1}; }

ConversionDevice device(double beta) {
    ConversionDevice d;
    d.length_mm = 40.0;
    d.pm_pump = Frequency(189200);
    d.beta_rad_per_mm_ghz = beta;
    d.calibration = {{1, {0.37, 0.012}}, {2, {0.39, 0.013}}, {3, {0.38, 0.010}}};
    return d;
}

}  // namespace

TEST(Frequency, RejectsNonPositive) {
    EXPECT_THROW(Frequency(0), DomainError);
    EXPECT_THROW(Frequency(-5), DomainError);
    EXPECT_DOUBLE_EQ(Frequency(189200).thz(), 189.2);
}

TEST(ChannelPlan, EndpointsOfSevenChannelPumpGrid) {
    EXPECT_EQ(channel_frequency(pump_plan(), 1).ghz(), 189383);
    EXPECT_EQ(channel_frequency(pump_plan(), 7).ghz(), 189533);
    EXPECT_THROW(channel_frequency(pump_plan(), 0), RangeError);
    EXPECT_THROW(channel_frequency(pump_plan(), 8), RangeError);
}

TEST(ChannelPlan, SingleChannelIsBase) {
    ChannelPlan p{Frequency(193100), 50, 1, +1};
    EXPECT_EQ(channel_frequency(p, 1).ghz(), 193100);
}

TEST(ChannelPlan, DescendingGridRoundTrips) {
    ChannelPlan out{Frequency(194850), 25, 7, -1};
    for (int i = 1; i <= 7; ++i) EXPECT_EQ(frequency_to_channel(out, channel_frequency(out, i)), i);
    EXPECT_EQ(channel_frequency(out, 7).ghz(), 194700);
    EXPECT_FALSE(frequency_to_channel(out, Frequency(194860)));
    EXPECT_FALSE(frequency_to_channel(out, Frequency(194875)));
    EXPECT_FALSE(frequency_to_channel(out, Frequency(194675)));
}

TEST(ChannelPlan, ValidateRejectsBadShapes) {
    EXPECT_THROW((ChannelPlan{Frequency(100), 0, 2, 1}.validate()), ConfigError);
    EXPECT_THROW((ChannelPlan{Frequency(100), 25, 0, 1}.validate()), ConfigError);
    EXPECT_THROW((ChannelPlan{Frequency(100), 25, 2, 2}.validate()), ConfigError);
    EXPECT_THROW((ChannelPlan{Frequency(100), 25, 5, -1}.validate()), ConfigError);
}

TEST(ConvertedFrequency, EnergyConservationAtGridEnds) {
    const Frequency signal(384233);
    EXPECT_EQ(converted_frequency(signal, Frequency(189383)).ghz(), 384233 - 189383);
    EXPECT_EQ(converted_frequency(signal, Frequency(189383)).ghz(), 194850);
    EXPECT_EQ(converted_frequency(signal, Frequency(189533)).ghz(), 194700);
    EXPECT_EQ(converted_frequency(Frequency(2000), Frequency(1000)).ghz(), 1000);
    EXPECT_THROW(converted_frequency(Frequency(1000), Frequency(1000)), DomainError);
}

TEST(PhaseMismatch, LinearModel) {
    auto d = device(1e-5);
    EXPECT_EQ(phase_mismatch(d, d.pm_pump), 0.0);
    EXPECT_NEAR(phase_mismatch(d, Frequency(189700)), 5e-3, 1e-15);
    EXPECT_NEAR(phase_mismatch(d, Frequency(188700)), -5e-3, 1e-15);
}

TEST(Envelope, PeakAndFirstNull) {
    auto d = device(1e-5);
    EXPECT_DOUBLE_EQ(envelope_efficiency(d, d.pm_pump), 0.39);
    // dk L / 2 = pi at a detuning of 2 pi / (beta L).
    d.beta_rad_per_mm_ghz = 2.0 * std::numbers::pi / (40.0 * 5000.0);
    EXPECT_NEAR(envelope_efficiency(d, Frequency(189200 + 5000)), 0.0, 1e-30);
}

TEST(Sinc, SmallArgumentIsContinuous) {
    EXPECT_EQ(sinc(0.0), 1.0);
    EXPECT_NEAR(sinc(1e-9), 1.0, 1e-15);
    EXPECT_NEAR(sinc(1e-7), std::sin(1e-7) / 1e-7, 1e-15);
    EXPECT_NEAR(sinc(std::numbers::pi), 0.0, 1e-15);
}

TEST(EfficiencyLaw, ClosedFormOptimum) {
    EXPECT_EQ(conversion_efficiency(0.38, 0.010, 0.0), 0.0);
    EXPECT_NEAR(optimal_pump_power(0.010), 246.74, 0.005);
    EXPECT_NEAR(optimal_pump_power(0.013), 189.80, 0.005);
    EXPECT_NEAR(optimal_pump_power(0.012), 205.62, 0.005);
    EXPECT_NEAR(conversion_efficiency(0.38, 0.010, optimal_pump_power(0.010)), 0.38, 1e-15);
    EXPECT_NEAR(conversion_efficiency(0.39, 0.013, optimal_pump_power(0.013)), 0.39, 1e-15);
    EXPECT_NEAR(conversion_efficiency(0.39, 0.013, 189.80), 0.39, 1e-8);
    EXPECT_THROW(conversion_efficiency(0.38, 0.010, -1.0), DomainError);
    EXPECT_THROW(optimal_pump_power(0.0), DomainError);
}

TEST(EfficiencyLaw, OptimumIsTheFirstMaximumOnAFineGrid) {
    for (double b : {0.010, 0.012, 0.013}) {
        double best_p = 0.0, best = -1.0;
        for (int k = 0; k <= 500000; ++k) {
            const double p = k * 0.001;
            const double e = conversion_efficiency(0.4, b, p);
            if (e > best) best = e, best_p = p;
        }
        EXPECT_NEAR(best_p, optimal_pump_power(b), 0.001);
    }
}

TEST(ChannelCount, Bands) {
    EXPECT_EQ(selectable_channel_count(Frequency(188200), Frequency(190700), 25), 100);
    EXPECT_EQ(selectable_channel_count(Frequency(189383), Frequency(189558), 25), 7);
    EXPECT_EQ(selectable_channel_count(Frequency(189383), Frequency(189383), 25), 0);
    EXPECT_EQ(selectable_channel_count(Frequency(189400), Frequency(189383), 25), 0);
    EXPECT_THROW(selectable_channel_count(Frequency(1), Frequency(2), 0), DomainError);
}

TEST(Calibration, HalfWidthSolvesSinc2) {
    for (double r : {0.99, 0.9487, 0.5, 0.1, 1e-3}) {
        const double x = sinc2_half_width(r);
        EXPECT_NEAR(std::pow(std::sin(x) / x, 2), r, 1e-12);
        EXPECT_GT(x, 0.0);
        EXPECT_LT(x, std::numbers::pi);
    }
    EXPECT_EQ(sinc2_half_width(1.0), 0.0);
    EXPECT_THROW(sinc2_half_width(0.0), DomainError);
    EXPECT_THROW(sinc2_half_width(1.01), DomainError);
}

TEST(Calibration, BetaPlacesRetentionAtTheBandEdge) {
    const double retention = 0.37 / 0.39;
    auto d = device(calibrate_beta(40.0, 1500, retention));
    EXPECT_NEAR(envelope_efficiency(d, Frequency(189200 + 1500)), 0.37, 1e-9);
    EXPECT_GT(envelope_efficiency(d, Frequency(189200 - 1000)), 0.37);
    // The envelope never exceeds its peak, so a 0.40 floor cannot be met when A_peak = 0.39.
    EXPECT_THROW(sinc2_half_width(0.40 / d.envelope_peak()), DomainError);
}

TEST(UsableBand, ContiguousAroundPhaseMatch) {
    auto d = device(calibrate_beta(40.0, 1500, 0.37 / 0.39));
    const auto band = usable_band(d, Frequency(186000), Frequency(192400), 25, 0.37);
    ASSERT_TRUE(band);
    EXPECT_EQ(band->high.ghz(), 190700);
    EXPECT_LE(band->low.ghz(), 188200);
    EXPECT_FALSE(usable_band(d, Frequency(186000), Frequency(192400), 25, 0.40));
}

TEST(Device, ValidateAndLookup) {
    auto d = device(1e-5);
    EXPECT_NO_THROW(d.validate());
    EXPECT_DOUBLE_EQ(d.envelope_peak(), 0.39);
    EXPECT_DOUBLE_EQ(d.channel(3).b_per_mw, 0.010);
    EXPECT_THROW(d.channel(9), ConfigError);
    d.calibration[4] = {1.2, 0.01};
    EXPECT_THROW(d.validate(), ConfigError);
}
