#pragma once

#include <cstddef>
#include <vector>

#include "evac/grid_response.hpp"

namespace evac {

struct OracleResult {
    bool feasible = false;
    int gamma = 0;              // best latest common start
    std::vector<int> starts;    // per TAZ; 0 for TAZs with nothing to charge
    double violation = 0.0;     // true violation total of the best schedule
    std::size_t evaluated = 0;  // start tuples examined
};

// Exhaustive search over one start time per TAZ. Each tuple fixes the whole schedule; it is feasible
// when every EV is full by departure and the simulated violation total is within lambdaMax.
// Among tuples with the largest gamma the smallest violation total wins, then the first in
// lexicographic order. Throws InputError when the tuple count exceeds `budget`.
OracleResult bruteForceOracle(const GridResponse& grid, double lambdaMax, std::size_t budget = 1000000, int jobs = 1);

}  // namespace evac
