#include "csqfc/scheduler.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "csqfc/errors.hpp"

namespace csqfc {

void RateConstraint::validate() const {
    if (!(tau_s_us >= 0.0)) throw ConfigError("switching time must be non-negative");
    if (!(tau_c_us > 0.0)) throw ConfigError("photon temporal width must be positive");
    if (!(round_period_us > 0.0)) throw ConfigError("round period must be positive");
    if (round_period_us < tau_s_us + tau_c_us) {
        throw ConfigError("round period shorter than switching time plus photon width");
    }
}

void NetworkConfig::validate() const {
    pump_plan.validate();
    if (midpoints < 1) throw ConfigError("at least one midpoint is required");
    if (max_rounds && *max_rounds < 0) throw ConfigError("max_rounds must be non-negative");
    const Frequency first = channel_frequency(pump_plan, 1);
    const Frequency last = channel_frequency(pump_plan, pump_plan.count);
    if (signal <= std::max(first, last)) throw ConfigError("signal frequency must exceed every pump frequency");
}

ChannelPlan NetworkConfig::output_plan() const {
    ChannelPlan out;
    out.base = converted_frequency(signal, pump_plan.base);
    out.spacing_ghz = pump_plan.spacing_ghz;
    out.count = pump_plan.count;
    out.direction = -pump_plan.direction;
    return out;
}

namespace {

void check_requests(std::span<const PartyLinkRequest> requests) {
    for (const auto& r : requests) {
        if (r.party_a == r.party_b) {
            throw ConfigError("party " + std::to_string(r.party_a) + " cannot link to itself");
        }
        if (r.party_a < 0 || r.party_b < 0) throw ConfigError("party ids must be non-negative");
        if (r.demand_rounds < 1) throw ConfigError("demand must be at least one round");
    }
}

}  // namespace

std::vector<RoundAssignment> schedule(std::span<const PartyLinkRequest> requests, const NetworkConfig& network,
                                      const RateConstraint& constraint) {
    network.validate();
    constraint.validate();
    check_requests(requests);

    struct Unit {
        int a, b, remaining;
    };
    std::vector<Unit> units;
    for (const auto& r : requests) {
        units.push_back({std::min(r.party_a, r.party_b), std::max(r.party_a, r.party_b), r.demand_rounds});
    }
    std::stable_sort(units.begin(), units.end(), [](const Unit& x, const Unit& y) {
        if (x.remaining != y.remaining) return x.remaining > y.remaining;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    const ChannelPlan out_plan = network.output_plan();
    const int channels = network.pump_plan.count;
    std::int64_t left = 0;
    for (const auto& u : units) left += u.remaining;

    std::vector<RoundAssignment> rounds;
    while (left > 0) {
        const int round = static_cast<int>(rounds.size()) + 1;
        if (network.max_rounds && round > *network.max_rounds) {
            throw InfeasibleError("round " + std::to_string(round) + " exceeds the limit of " +
                                  std::to_string(*network.max_rounds) + " rounds with " + std::to_string(left) +
                                  " link-rounds unscheduled");
        }
        RoundAssignment ra;
        ra.round = round;
        std::set<int> busy;
        std::vector<std::vector<bool>> used(static_cast<std::size_t>(network.midpoints),
                                            std::vector<bool>(static_cast<std::size_t>(channels), false));
        for (auto& u : units) {
            if (u.remaining == 0 || busy.contains(u.a) || busy.contains(u.b)) continue;
            std::optional<std::pair<int, int>> slot;
            for (int c = 1; c <= channels && !slot; ++c) {
                for (int m = 1; m <= network.midpoints && !slot; ++m) {
                    if (!used[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(c - 1)]) slot = {m, c};
                }
            }
            if (!slot) break;  // every (midpoint, channel) slot taken this round
            const auto [m, c] = *slot;
            used[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(c - 1)] = true;
            busy.insert(u.a);
            busy.insert(u.b);
            const Frequency converted = converted_frequency(network.signal, channel_frequency(network.pump_plan, c));
            ra.pairings.push_back({u.a, u.b, c, c, m, *frequency_to_channel(out_plan, converted)});
            --u.remaining;
            --left;
        }
        if (ra.pairings.empty()) {
            throw InfeasibleError("round " + std::to_string(round) + " could not host any link");
        }
        rounds.push_back(std::move(ra));
    }
    return rounds;
}

std::vector<std::string> validate_schedule(std::span<const PartyLinkRequest> requests, const NetworkConfig& network,
                                           std::span<const RoundAssignment> rounds) {
    std::vector<std::string> problems;
    auto complain = [&](int round, const std::string& what) {
        problems.push_back("round " + std::to_string(round) + ": " + what);
    };
    const ChannelPlan out_plan = network.output_plan();

    std::map<std::pair<int, int>, int> wanted;
    for (const auto& r : requests) wanted[{std::min(r.party_a, r.party_b), std::max(r.party_a, r.party_b)}] += r.demand_rounds;
    std::map<std::pair<int, int>, int> served;

    int expected_round = 1;
    for (const auto& ra : rounds) {
        if (ra.round != expected_round) complain(ra.round, "rounds are not numbered consecutively");
        ++expected_round;
        std::set<int> parties;
        std::set<std::pair<int, int>> slots;
        for (const auto& p : ra.pairings) {
            for (int party : {p.party_a, p.party_b}) {
                if (!parties.insert(party).second) complain(ra.round, "party " + std::to_string(party) + " used twice");
            }
            if (p.midpoint < 1 || p.midpoint > network.midpoints) {
                complain(ra.round, "midpoint " + std::to_string(p.midpoint) + " does not exist");
            }
            if (p.pump_channel_a < 1 || p.pump_channel_a > network.pump_plan.count || p.pump_channel_b < 1 ||
                p.pump_channel_b > network.pump_plan.count) {
                complain(ra.round, "pump channel outside the plan");
                continue;
            }
            const Frequency fa = converted_frequency(network.signal, channel_frequency(network.pump_plan, p.pump_channel_a));
            const Frequency fb = converted_frequency(network.signal, channel_frequency(network.pump_plan, p.pump_channel_b));
            if (fa != fb) {
                complain(ra.round, "parties " + std::to_string(p.party_a) + " and " + std::to_string(p.party_b) +
                                       " convert to different frequencies");
            }
            const auto ch = frequency_to_channel(out_plan, fa);
            if (!ch || *ch != p.converted_channel) complain(ra.round, "converted channel does not match the pump");
            if (!slots.insert({p.midpoint, p.converted_channel}).second) {
                complain(ra.round, "channel " + std::to_string(p.converted_channel) + " reused at midpoint " +
                                       std::to_string(p.midpoint));
            }
            ++served[{std::min(p.party_a, p.party_b), std::max(p.party_a, p.party_b)}];
        }
    }
    if (served != wanted) problems.push_back("served link-rounds differ from the requested demand");
    return problems;
}

double duty_factor(const RateConstraint& constraint) {
    return constraint.tau_c_us / (constraint.tau_c_us + constraint.tau_s_us);
}

double effective_rate(const RateConstraint& constraint, double per_round_success_prob) {
    if (!(per_round_success_prob >= 0.0 && per_round_success_prob <= 1.0)) {
        throw DomainError("success probability outside [0, 1]");
    }
    return per_round_success_prob * duty_factor(constraint) / (constraint.round_period_us * 1e-6);
}

FeasibilityReport feasibility_report(std::span<const RoundAssignment> rounds,
                                     std::span<const PumpChannelConfig> pump_configs,
                                     const RateConstraint& constraint, const NetworkConfig& network) {
    FeasibilityReport rep;
    rep.rounds = static_cast<int>(rounds.size());
    rep.min_switch_interval_us = min_switch_interval(pump_configs);
    rep.channel_use.assign(static_cast<std::size_t>(network.pump_plan.count), 0);

    std::map<int, std::pair<int, int>> last;  // party -> (round, pump channel)
    std::size_t pairings = 0;
    for (const auto& ra : rounds) {
        for (const auto& p : ra.pairings) {
            ++pairings;
            if (p.converted_channel >= 1 && p.converted_channel <= network.pump_plan.count) {
                ++rep.channel_use[static_cast<std::size_t>(p.converted_channel - 1)];
            }
            for (const auto& [party, pump] : {std::pair{p.party_a, p.pump_channel_a}, std::pair{p.party_b, p.pump_channel_b}}) {
                auto it = last.find(party);
                if (it != last.end() && it->second.second != pump) {
                    ++rep.channel_switches;
                    const double sep = (ra.round - it->second.first) * constraint.round_period_us;
                    if (sep < rep.min_switch_interval_us) {
                        rep.violations.push_back({party, it->second.first, ra.round, it->second.second, pump, sep});
                    }
                }
                last[party] = {ra.round, pump};
            }
        }
    }
    const double slots = static_cast<double>(rep.rounds) * network.midpoints * network.pump_plan.count;
    rep.utilization = slots > 0.0 ? static_cast<double>(pairings) / slots : 0.0;
    return rep;
}

std::string schedule_csv(std::span<const RoundAssignment> rounds) {
    std::ostringstream os;
    os << "round,party,pump_channel,midpoint,converted_channel\n";
    for (const auto& ra : rounds) {
        for (const auto& p : ra.pairings) {
            os << ra.round << ',' << p.party_a << ',' << p.pump_channel_a << ',' << p.midpoint << ','
               << p.converted_channel << '\n';
            os << ra.round << ',' << p.party_b << ',' << p.pump_channel_b << ',' << p.midpoint << ','
               << p.converted_channel << '\n';
        }
    }
    return os.str();
}

}  // namespace csqfc
