#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "evac/netmodel.hpp"

namespace evac {

enum class PhasePattern { single, three, mixed };
PhasePattern parsePhasePattern(std::string_view s);
const char* toString(PhasePattern p);

struct FeederSpec {
    int buses = 6;
    PhasePattern phases = PhasePattern::three;
    int tazs = 2;
    int evsPerTaz = 2;
    std::uint64_t seed = 1;

    ScenarioConfig config;
    double startHour = 0.0;        // clock time of t = 1; steps are 15 minutes
    double baseKv = 4.16;
    double baseKva = 1000.0;       // per phase
    double impedanceScale = 1.0;   // multiplies the typical per-unit line impedance
    double loadFactor = 0.8;       // fraction of the largest violation-free background scaling
    std::vector<int> departures;   // per TAZ; empty selects evenly spaced late departures
    int minSteps = 1;              // bounds on charging steps drawn per EV
    int maxSteps = 0;              // 0 selects beta / 2
    bool evsAtFarEnd = false;      // place EVs on the deepest buses only
};

// Random radial feeder with a mid-summer daily load curve. The background is scaled so that the
// no-EV case has no voltage violation. Identical specs give identical scenarios.
ScenarioData generateSyntheticFeeder(const FeederSpec& spec);

// Mid-summer residential demand shape at a clock hour, normalized to a daily peak of 1.
double summerLoadShape(double hour);

}  // namespace evac
