#pragma once

#include <map>
#include <vector>

#include "evac/cla.hpp"
#include "evac/mathprog.hpp"
#include "evac/schedule.hpp"

namespace evac {

struct EevcInstance {
    const ScenarioData* scenario = nullptr;
    std::vector<ClaKey> active;  // surrogate constraints to include
    double lambdaMax = 0.0;      // +inf drops the budget row
    bool includeGrid = false;    // false: the naive program without surrogates
};

// Column indices of the decision variables. Time-indexed vectors hold t at [t - 1].
struct EevcLayout {
    std::size_t gamma = 0;
    std::vector<std::size_t> tau;
    std::vector<std::vector<std::size_t>> cTaz;     // [taz][t-1]
    std::vector<std::vector<std::size_t>> cEv;      // [ev][t-1]
    std::vector<std::vector<std::size_t>> battery;  // [ev][t-1], levels L^1..L^T
    std::map<ClaKey, std::size_t> slack;
};

struct EevcProgram {
    mp::Program program;
    EevcLayout layout;
};

// Size of the program for E EVs, X TAZs, horizon T and A active surrogates:
//   variables   1 + T + X*T + 2*E*T + A
//   binaries    T + X*T + E*T
//   constraints 2*T + E*T + 2*X*T + 2*E*T + X + A + (1 if A > 0 and the budget is finite)
struct EevcCounts {
    std::size_t variables = 0;
    std::size_t binaries = 0;
    std::size_t constraints = 0;
};
EevcCounts eevcCounts(std::size_t evs, std::size_t tazs, int horizon, std::size_t active, bool finiteBudget);

EevcProgram buildProgram(const EevcInstance& inst, const ClaModel& cla);

// Solver settings that exploit the program's structure: tau is branched first, then the TAZ flags,
// and the objective only takes integer values at integer points.
mp::MilpOptions eevcMilpOptions(const EevcProgram& ep, mp::MilpOptions base = {});

// Rounds binaries (each must lie within 1e-6 of 0 or 1), rebuilds the schedule from the charging
// flags and re-validates every charging rule. Throws ScheduleError on any breach.
ChargeSchedule decode(const EevcProgram& ep, const mp::Solution& sol, const EevcInstance& inst);

}  // namespace evac
