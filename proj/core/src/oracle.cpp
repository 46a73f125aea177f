#include "evac/oracle.hpp"

#include <algorithm>
#include <map>

#include "evac/errors.hpp"
#include "evac/parallel.hpp"
#include "evac/schedule.hpp"
#include "evac/simulate.hpp"

namespace evac {

OracleResult bruteForceOracle(const GridResponse& grid, double lambdaMax, std::size_t budget, int jobs) {
    const ScenarioData& sc = grid.scenario();
    const int T = sc.horizon();
    const std::size_t nTaz = sc.tazs().size();

    // Feasible starts s of a TAZ with window w satisfy s >= 1 and s + w <= departure.
    std::vector<int> lastStart(nTaz, 0);
    std::vector<std::size_t> charging;
    double tuples = 1.0;
    OracleResult best;
    for (std::size_t k = 0; k < nTaz; ++k) {
        const int w = sc.tazWindow(k);
        if (w == 0) continue;
        lastStart[k] = sc.tazs()[k].departure - w;
        if (lastStart[k] < 1) return best;
        charging.push_back(k);
        tuples *= lastStart[k];
    }
    if (tuples > static_cast<double>(budget)) {
        throw InputError("oracle: " + std::to_string(static_cast<long long>(tuples)) + " start tuples exceed the budget of " +
                         std::to_string(budget));
    }

    // Violation of one time step depends only on which EVs charge then; cache by pattern.
    std::map<std::pair<int, std::vector<std::uint8_t>>, double> cache;
    const auto stepViolation = [&](const ChargeSchedule& s) {
        std::vector<std::pair<int, std::vector<std::uint8_t>>> missing;
        for (int t = 1; t <= T; ++t) {
            auto key = std::make_pair(t, s.chargingAt(t));
            if (!cache.count(key)) missing.push_back(std::move(key));
        }
        std::vector<double> values(missing.size());
        parallelFor(missing.size(), jobs, [&](std::size_t i) {
            const auto v2 = grid.squaredVoltages(missing[i].first, missing[i].second);
            ViolationReport r;
            scoreViolations(sc, missing[i].first, v2, r);
            values[i] = r.total();
        });
        for (std::size_t i = 0; i < missing.size(); ++i) cache.emplace(std::move(missing[i]), values[i]);
        double total = 0.0;
        for (int t = 1; t <= T; ++t) total += cache.at({t, s.chargingAt(t)});
        return total;
    };

    std::vector<int> starts(nTaz, 0);
    for (std::size_t k : charging) starts[k] = 1;
    while (true) {
        int gamma = T;
        for (std::size_t k : charging) gamma = std::min(gamma, starts[k]);
        if (!best.feasible || gamma >= best.gamma) {
            ++best.evaluated;
            const ChargeSchedule s = scheduleFromStarts(sc, starts);
            const double total = stepViolation(s);
            if (withinBudget(total, lambdaMax)) {
                if (!best.feasible || gamma > best.gamma || total < best.violation) {
                    best.feasible = true;
                    best.gamma = gamma;
                    best.starts = starts;
                    best.violation = total;
                }
            }
        }
        // Next tuple in lexicographic order.
        std::size_t pos = charging.size();
        while (pos > 0) {
            const std::size_t k = charging[pos - 1];
            if (starts[k] < lastStart[k]) {
                ++starts[k];
                break;
            }
            starts[k] = 1;
            --pos;
        }
        if (pos == 0) break;
    }
    return best;
}

}  // namespace evac
