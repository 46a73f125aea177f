#include "fixtures.hpp"

#include <algorithm>

#include "evac/powerflow.hpp"

namespace evac::testing {

std::filesystem::path dataDir() { return EVAC_DATA_DIR; }

std::vector<std::string> tinyFixtureNames() {
    return {"tiny/seed_1", "tiny/seed_2", "tiny/seed_3", "tiny/seed_4", "tiny/seed_5"};
}

std::vector<std::string> fixtureNames() {
    std::vector<std::string> names = tinyFixtureNames();
    names.push_back("weak_feeder");
    names.push_back("mixed_feeder");
    return names;
}

ScenarioData loadFixture(const std::string& name) {
    const auto dir = dataDir() / name;
    return loadScenario(ScenarioPaths{dir / "network.json", dir / "loads.csv", dir / "evs.csv", dir / "tazs.csv",
                                      dir / "config.json"});
}

AffineResponse linearizedResponse(const ScenarioData& scenario) {
    const PowerFlowResponse pf(scenario);
    const std::size_t nodes = scenario.network().nodes().size();
    const std::vector<std::uint8_t> off(scenario.evs().size(), 0);
    const std::vector<std::uint8_t> on(scenario.evs().size(), 1);

    std::vector<std::vector<double>> base;
    int busiest = 1;
    double lowest = 1e300;
    for (int t = 1; t <= scenario.horizon(); ++t) {
        base.push_back(pf.squaredVoltages(t, off));
        const double m = *std::min_element(base.back().begin(), base.back().end());
        if (m < lowest) {
            lowest = m;
            busiest = t;
        }
    }
    // One EV bus at a time, everything else off.
    std::vector<std::vector<double>> sens(nodes, std::vector<double>(scenario.evBuses().size(), 0.0));
    for (std::size_t k = 0; k < scenario.evBuses().size(); ++k) {
        std::vector<std::uint8_t> charging(scenario.evs().size(), 0);
        for (std::size_t h = 0; h < scenario.evs().size(); ++h) charging[h] = scenario.evBusSlot(h) == k ? 1 : 0;
        const double pk = busDemandPu(scenario, charging)[k];
        const auto v = pf.squaredVoltages(busiest, charging);
        for (std::size_t i = 0; i < nodes; ++i) sens[i][k] = (v[i] - base[static_cast<std::size_t>(busiest - 1)][i]) / pk;
    }
    return AffineResponse(scenario, std::move(base), std::move(sens));
}

AffineResponse cutoffResponse(const ScenarioData& scenario, int cutoff, double early, double late) {
    const std::size_t nodes = scenario.network().nodes().size();
    std::vector<std::vector<double>> base;
    for (int t = 1; t <= scenario.horizon(); ++t) base.emplace_back(nodes, t <= cutoff ? early : late);
    std::vector<std::vector<double>> sens(nodes, std::vector<double>(scenario.evBuses().size(), -1.0));
    return AffineResponse(scenario, std::move(base), std::move(sens));
}

std::vector<int> latestStarts(const ScenarioData& scenario) {
    std::vector<int> starts;
    for (std::size_t k = 0; k < scenario.tazs().size(); ++k) starts.push_back(scenario.tazs()[k].departure - scenario.tazWindow(k));
    return starts;
}

int naiveGamma(const ScenarioData& scenario) {
    const std::vector<int> starts = latestStarts(scenario);
    return std::min(scenario.horizon(), *std::min_element(starts.begin(), starts.end()));
}

std::filesystem::path scratchDir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("evac_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace evac::testing
