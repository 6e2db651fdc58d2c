#ifndef CSQFC_SCHEDULER_HPP
#define CSQFC_SCHEDULER_HPP

// Round-based channel assignment for multiparty links. Every party owns a
// converter fed by the same signal frequency; a link between two parties in a
// round needs both photons converted into the same DWDM channel so they can be
// interfered at a midpoint. Within a round a party is used once, and a channel
// once per midpoint.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csqfc/pump_bank.hpp"
#include "csqfc/spectral.hpp"

namespace csqfc {

struct PartyLinkRequest {
    int party_a = 0;
    int party_b = 1;
    int demand_rounds = 1;

    friend bool operator==(const PartyLinkRequest&, const PartyLinkRequest&) = default;
};

struct RateConstraint {
    double tau_s_us = 0.01;        // pump switching time
    double tau_c_us = 0.026;       // photon temporal width
    double round_period_us = 1.0;

    void validate() const;
};

struct Pairing {
    int party_a = 0;
    int party_b = 0;
    int pump_channel_a = 0;
    int pump_channel_b = 0;
    int midpoint = 0;
    int converted_channel = 0;  // DWDM channel both photons land in

    friend bool operator==(const Pairing&, const Pairing&) = default;
};

struct RoundAssignment {
    int round = 1;
    std::vector<Pairing> pairings;

    friend bool operator==(const RoundAssignment&, const RoundAssignment&) = default;
};

// Every party's converter uses the same pump grid and the same signal
// frequency. The converted-channel grid is derived from the pump grid.
struct NetworkConfig {
    ChannelPlan pump_plan;
    Frequency signal;
    int midpoints = 1;
    std::optional<int> max_rounds;  // fail instead of growing past this many rounds

    void validate() const;
    ChannelPlan output_plan() const;
};

// Greedy round packing: demand units are ordered by decreasing demand, then by
// party pair; each round takes the units whose parties are still free, giving
// each the lowest free (midpoint, channel) slot. Not optimal; replaceable.
std::vector<RoundAssignment> schedule(std::span<const PartyLinkRequest> requests, const NetworkConfig& network,
                                      const RateConstraint& constraint);

// Independent check of a schedule against its requests. Empty when valid.
std::vector<std::string> validate_schedule(std::span<const PartyLinkRequest> requests, const NetworkConfig& network,
                                           std::span<const RoundAssignment> rounds);

// Fraction of each round period in which the photon can be used:
// tau_c / (tau_c + tau_s).
double duty_factor(const RateConstraint& constraint);

// Successful links per second.
double effective_rate(const RateConstraint& constraint, double per_round_success_prob);

struct SwitchViolation {
    int party = 0;
    int from_round = 0;
    int to_round = 0;
    int from_channel = 0;
    int to_channel = 0;
    double separation_us = 0.0;
};

struct FeasibilityReport {
    int rounds = 0;
    int channel_switches = 0;
    double min_switch_interval_us = 0.0;
    std::vector<SwitchViolation> violations;
    std::vector<int> channel_use;  // pairings per converted channel, index channel - 1
    double utilization = 0.0;      // used (round, midpoint, channel) slots / available

    bool ok() const { return violations.empty(); }
};

FeasibilityReport feasibility_report(std::span<const RoundAssignment> rounds,
                                     std::span<const PumpChannelConfig> pump_configs,
                                     const RateConstraint& constraint, const NetworkConfig& network);

std::string schedule_csv(std::span<const RoundAssignment> rounds);

}  // namespace csqfc

#endif
