#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "evac/grid_response.hpp"
#include "evac/netmodel.hpp"
#include "evac/synthetic.hpp"

namespace evac::testing {

std::filesystem::path dataDir();

// Bundled scenario directories relative to the data directory.
std::vector<std::string> fixtureNames();
std::vector<std::string> tinyFixtureNames();

ScenarioData loadFixture(const std::string& name);

// Affine stand-in for the power flow: background squared voltages at every step plus a
// per-EV-bus sensitivity taken from one full-charging power flow at the busiest step.
AffineResponse linearizedResponse(const ScenarioData& scenario);

// Flat squared voltage `early` up to step `cutoff` and `late` after it, falling by one per
// per-unit of EV demand on any bus.
AffineResponse cutoffResponse(const ScenarioData& scenario, int cutoff, double early, double late);

// Latest feasible start of every TAZ, departure minus window length.
std::vector<int> latestStarts(const ScenarioData& scenario);
// Earliest of the latest starts: the naive schedule's gamma.
int naiveGamma(const ScenarioData& scenario);

// Fresh empty directory under the system temp directory.
std::filesystem::path scratchDir(const std::string& name);

}  // namespace evac::testing
