#include "csqfc/scheduler.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "csqfc/errors.hpp"
#include "oracles.hpp"

using namespace csqfc;

namespace {

NetworkConfig network(int channels, int midpoints = 1) {
    NetworkConfig n;
    n.pump_plan = {Frequency(189383), 25, channels, +1};
    n.signal = Frequency(384233);
    n.midpoints = midpoints;
    return n;
}

std::vector<PartyLinkRequest> all_to_all(int parties) {
    std::vector<PartyLinkRequest> r;
    for (int a = 0; a < parties; ++a)
        for (int b = a + 1; b < parties; ++b) r.push_back({a, b, 1});
    return r;
}

std::vector<oracle::Link> links(const std::vector<PartyLinkRequest>& r) {
    std::vector<oracle::Link> l;
    for (const auto& q : r) l.push_back({q.party_a, q.party_b, q.demand_rounds});
    return l;
}

std::vector<PumpChannelConfig> pumps(int n, double rise_fall) {
    std::vector<PumpChannelConfig> p;
    for (int c = 1; c <= n; ++c) p.push_back({c, Frequency(189383 + 25 * (c - 1)), 200.0, rise_fall});
    return p;
}

}  // namespace

TEST(Schedule, SinglePair) {
    const std::vector<PartyLinkRequest> r{{0, 1, 1}};
    const auto s = schedule(r, network(3), {});
    ASSERT_EQ(s.size(), 1u);
    ASSERT_EQ(s[0].pairings.size(), 1u);
    EXPECT_EQ(s[0].pairings[0].pump_channel_a, s[0].pairings[0].pump_channel_b);
    EXPECT_TRUE(validate_schedule(r, network(3), s).empty());
}

TEST(Schedule, NoRequestsNoRounds) {
    EXPECT_TRUE(schedule({}, network(2), {}).empty());
}

TEST(Schedule, FourPartyAllToAll) {
    const auto r = all_to_all(4);
    const auto s = schedule(r, network(3), {});
    EXPECT_TRUE(validate_schedule(r, network(3), s).empty());
    EXPECT_GE(s.size(), 2u);
    for (const auto& round : s) EXPECT_LE(round.pairings.size(), 2u);
    EXPECT_EQ(oracle::min_rounds(links(r), 3), 3);
    EXPECT_LE(static_cast<int>(s.size()), 2 * oracle::min_rounds(links(r), 3));
}

TEST(Schedule, ConvertedChannelsAgreeWithEnergyConservation) {
    const auto r = all_to_all(6);
    const auto net = network(4);
    for (const auto& round : schedule(r, net, {})) {
        for (const auto& p : round.pairings) {
            const auto f = converted_frequency(net.signal, channel_frequency(net.pump_plan, p.pump_channel_a));
            EXPECT_EQ(frequency_to_channel(net.output_plan(), f), p.converted_channel);
        }
    }
}

TEST(Schedule, RoundLimitIsInfeasible) {
    auto net = network(1);
    net.max_rounds = 2;
    EXPECT_THROW(schedule(all_to_all(4), net, {}), InfeasibleError);
}

TEST(Schedule, RejectsSelfLinks) {
    const std::vector<PartyLinkRequest> r{{2, 2, 1}};
    EXPECT_THROW(schedule(r, network(2), {}), ConfigError);
}

TEST(Validator, CatchesConflicts) {
    const std::vector<PartyLinkRequest> r{{0, 1, 1}, {0, 2, 1}};
    std::vector<RoundAssignment> bad{{1, {{0, 1, 1, 1, 1, 1}, {0, 2, 2, 2, 1, 2}}}};
    EXPECT_FALSE(validate_schedule(r, network(2), bad).empty());
    std::vector<RoundAssignment> mixed{{1, {{0, 1, 1, 2, 1, 1}}}, {2, {{0, 2, 1, 1, 1, 1}}}};
    EXPECT_FALSE(validate_schedule(r, network(2), mixed).empty());
    std::vector<RoundAssignment> shared{{1, {{0, 1, 1, 1, 1, 1}, {2, 3, 1, 1, 1, 1}}}};
    const std::vector<PartyLinkRequest> r2{{0, 1, 1}, {2, 3, 1}};
    EXPECT_FALSE(validate_schedule(r2, network(2), shared).empty());
    std::vector<RoundAssignment> missing{{1, {{0, 1, 1, 1, 1, 1}}}};
    EXPECT_FALSE(validate_schedule(r, network(2), missing).empty());
}

TEST(Schedule, MidpointsAddCapacity) {
    const auto r = all_to_all(6);
    const auto one = schedule(r, network(1, 1), {});
    const auto three = schedule(r, network(1, 3), {});
    EXPECT_TRUE(validate_schedule(r, network(1, 3), three).empty());
    EXPECT_EQ(one.size(), 15u);
    EXPECT_LT(three.size(), one.size());
}

TEST(Schedule, WithinTwiceOptimalOnSmallInstances) {
    for (int parties = 2; parties <= 5; ++parties) {
        const auto full = all_to_all(parties);
        const auto n = full.size();
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<PartyLinkRequest> r;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) r.push_back(full[i]);
            for (int channels = 1; channels <= 4; ++channels) {
                const auto net = network(channels);
                const auto s = schedule(r, net, {});
                ASSERT_TRUE(validate_schedule(r, net, s).empty());
                ASSERT_LE(static_cast<int>(s.size()), 2 * oracle::min_rounds(links(r), channels));
            }
        }
    }
}

TEST(Rate, DutyFactor) {
    EXPECT_NEAR(duty_factor({0.010, 0.026, 1.0}), 26.0 / 36.0, 1e-15);
    EXPECT_GT(duty_factor({0.010, 0.026, 1.0}), 0.5);
    EXPECT_DOUBLE_EQ(duty_factor({0.02, 0.02, 1.0}), 0.5);
    EXPECT_DOUBLE_EQ(effective_rate({0.0, 0.026, 2.0}, 0.5), 0.5 / 2e-6);
    EXPECT_THROW(effective_rate({}, 1.5), DomainError);
    EXPECT_THROW((RateConstraint{0.5, 0.6, 1.0}.validate()), ConfigError);
}

TEST(Feasibility, SwitchSeparation) {
    const auto r = all_to_all(4);
    const auto net = network(3);
    const auto s = schedule(r, net, {});
    const auto slow = feasibility_report(s, pumps(3, 0.5), {0.01, 0.026, 100.0}, net);
    EXPECT_TRUE(slow.ok());
    const auto fast = feasibility_report(s, pumps(3, 0.5), {0.01, 0.026, 0.3}, net);
    EXPECT_EQ(static_cast<int>(fast.violations.size()), fast.channel_switches);
    EXPECT_GT(fast.channel_switches, 0);
    const std::vector<PartyLinkRequest> one{{0, 1, 1}};
    EXPECT_TRUE(feasibility_report(schedule(one, net, {}), pumps(3, 0.5), {0.01, 0.026, 0.3}, net).ok());
}

TEST(Feasibility, Utilization) {
    const auto r = all_to_all(4);
    const auto net = network(2);
    const auto s = schedule(r, net, {});
    const auto rep = feasibility_report(s, pumps(2, 0.5), {}, net);
    EXPECT_DOUBLE_EQ(rep.utilization, 6.0 / (2.0 * static_cast<double>(s.size())));
    int total = 0;
    for (int u : rep.channel_use) total += u;
    EXPECT_EQ(total, 6);
}

TEST(Csv, ScheduleRows) {
    const std::vector<PartyLinkRequest> r{{0, 1, 1}};
    EXPECT_EQ(schedule_csv(schedule(r, network(2), {})),
              "round,party,pump_channel,midpoint,converted_channel\n1,0,1,1,1\n1,1,1,1,1\n");
}
