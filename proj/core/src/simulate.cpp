#include "evac/simulate.hpp"

#include <algorithm>

#include "evac/csv.hpp"
#include "evac/parallel.hpp"

namespace evac {

double ViolationReport::total() const {
    double s = 0.0;
    for (const Violation& v : entries) s += v.magnitude;
    return s;
}

double violationTotal(const ViolationReport& report) { return report.total(); }

bool withinBudget(double total, double lambdaMax) { return total <= lambdaMax + 1e-12; }
bool withinBudget(const ViolationReport& report, double lambdaMax) { return withinBudget(report.total(), lambdaMax); }

void scoreViolations(const ScenarioData& scenario, int t, const std::vector<double>& v2, ViolationReport& report) {
    const double vMax = scenario.config().vMax;
    const double vMin = scenario.config().vMin;
    for (std::size_t i = 0; i < v2.size(); ++i) {
        if (v2[i] > vMax) report.entries.push_back(Violation{i, t, Sense::over, v2[i] - vMax});
        else if (v2[i] < vMin) report.entries.push_back(Violation{i, t, Sense::under, vMin - v2[i]});
    }
}

SimulationResult simulateSchedule(const GridResponse& grid, const ChargeSchedule& schedule, int jobs) {
    const ScenarioData& scenario = grid.scenario();
    const int T = scenario.horizon();
    SimulationResult out;
    out.v2.resize(static_cast<std::size_t>(T));
    parallelFor(static_cast<std::size_t>(T), jobs, [&](std::size_t k) {
        const int t = static_cast<int>(k) + 1;
        out.v2[k] = grid.squaredVoltages(t, schedule.chargingAt(t));
    });
    for (int t = 1; t <= T; ++t) scoreViolations(scenario, t, out.v2[static_cast<std::size_t>(t - 1)], out.report);
    return out;
}

std::string violationsToCsv(const ScenarioData& scenario, const ViolationReport& report, const Provenance& prov) {
    std::string out = prov.csvHeader() + "node,t,kind,magnitude\n";
    for (const Violation& v : report.entries) {
        out += scenario.network().nodes()[v.node].str() + "," + std::to_string(v.t) + "," + toString(v.kind) + "," +
               formatExact(v.magnitude) + "\n";
    }
    out += "total,,," + formatExact(report.total()) + "\n";
    return out;
}

}  // namespace evac
