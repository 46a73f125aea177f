#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evac/netmodel.hpp"
#include "evac/provenance.hpp"
#include "evac/types.hpp"

namespace evac {

// Decoded charging decisions. Time steps are 1-based; vectors indexed by t hold entry t at [t - 1].
struct ChargeSchedule {
    int horizon = 0;
    int gammaMax = 0;
    std::vector<std::uint8_t> tau;                       // [t-1]
    std::vector<std::vector<std::uint8_t>> tazCharging;  // [taz][t-1]
    std::vector<std::vector<std::uint8_t>> evCharging;   // [ev][t-1]
    std::vector<std::vector<double>> battery;            // [ev][t], t = 0..T; entries 0 and 1 hold soc0
    std::map<ClaKey, double> predictedSlacks;

    double predictedSlackTotal() const;
    // Charging flag of every EV at time t.
    std::vector<std::uint8_t> chargingAt(int t) const;
    // First and last charging step of a TAZ, if it charges at all.
    std::optional<std::pair<int, int>> tazWindow(std::size_t taz) const;
};

// The unique schedule in which TAZ k starts at starts[k] (ignored for TAZs with nothing to charge)
// and every EV charges from the TAZ start until full.
ChargeSchedule scheduleFromStarts(const ScenarioData& scenario, std::span<const int> starts);

// Fills battery levels, tau and gammaMax from the TAZ and EV charging flags.
void deriveScheduleState(ChargeSchedule& schedule, const ScenarioData& scenario);

// Latest common start: first charging step over all TAZs, or T when nothing charges.
int gammaFromCharging(const ChargeSchedule& schedule);

// Throws ScheduleError naming the first broken charging-logic rule.
void validateSchedule(const ScenarioData& scenario, const ChargeSchedule& schedule, double lambdaMax);

// p_EV per time step and EV bus, p.u.: [t-1][k].
std::vector<std::vector<double>> scheduleToDemand(const ChargeSchedule& schedule, const ScenarioData& scenario);

std::string scheduleToCsv(const ChargeSchedule& schedule, const ScenarioData& scenario, const Provenance& prov);
std::string evScheduleToCsv(const ChargeSchedule& schedule, const ScenarioData& scenario, const Provenance& prov);
std::string ganttToJson(const ChargeSchedule& schedule, const ScenarioData& scenario, const Provenance& prov);

}  // namespace evac
