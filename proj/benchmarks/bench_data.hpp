#pragma once

#include <filesystem>
#include <string>

#include "evac/netmodel.hpp"

namespace evac::bench {

inline ScenarioData loadBundled(const std::string& name) {
    const std::filesystem::path dir = std::filesystem::path(EVAC_DATA_DIR) / name;
    return loadScenario(ScenarioPaths{dir / "network.json", dir / "loads.csv", dir / "evs.csv", dir / "tazs.csv", dir / "config.json"});
}

}  // namespace evac::bench
