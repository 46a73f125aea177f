#pragma once

#include <string>
#include <vector>

#include "evac/grid_response.hpp"
#include "evac/provenance.hpp"
#include "evac/schedule.hpp"
#include "evac/types.hpp"

namespace evac {

struct Violation {
    std::size_t node = 0;
    int t = 0;
    Sense kind = Sense::over;
    double magnitude = 0.0;  // > 0, squared p.u.
};

// Bound exceedances ordered by t, then node.
struct ViolationReport {
    std::vector<Violation> entries;

    double total() const;
    std::size_t count() const { return entries.size(); }
};

double violationTotal(const ViolationReport& report);
bool withinBudget(double total, double lambdaMax);
bool withinBudget(const ViolationReport& report, double lambdaMax);

// Exceedances of [vMin, vMax] in one time step's squared voltages.
void scoreViolations(const ScenarioData& scenario, int t, const std::vector<double>& v2, ViolationReport& report);

struct SimulationResult {
    std::vector<std::vector<double>> v2;  // [t-1][node]
    ViolationReport report;
};

// One grid evaluation per time step, run on up to `jobs` threads.
SimulationResult simulateSchedule(const GridResponse& grid, const ChargeSchedule& schedule, int jobs = 1);

// `node,t,kind,magnitude` rows plus a trailing `total,,,<sum>` row.
std::string violationsToCsv(const ScenarioData& scenario, const ViolationReport& report, const Provenance& prov);

}  // namespace evac
