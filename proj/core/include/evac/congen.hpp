#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evac/cla.hpp"
#include "evac/eevc.hpp"
#include "evac/grid_response.hpp"
#include "evac/mathprog.hpp"
#include "evac/schedule.hpp"
#include "evac/simulate.hpp"

namespace evac {

struct CongenConfig {
    std::size_t sampleCount = 0;  // 0 selects defaultSampleCount
    std::uint64_t seed = 1;
    int maxIterations = 10;
    double lambdaMax = 0.0;
    bool naive = false;           // stop after the first (unconstrained) solve
    int jobs = 1;
    std::string externalSolver;   // command template; empty uses the built-in solver
    std::string workDir;          // scratch directory for the external solver
    mp::MilpOptions milp;
};

enum class CongenStatus { converged, infeasible, iterationLimit };
const char* toString(CongenStatus s);

struct IterationTrace {
    int iteration = 0;
    int gamma = 0;
    double predictedSlack = 0.0;
    double actualViolation = 0.0;
    std::size_t violationCount = 0;
    std::size_t constraints = 0;   // active surrogates in this iteration's program
    std::vector<ClaKey> added;     // surrogates added after this iteration's simulation
    double wallSeconds = 0.0;
    std::size_t milpNodes = 0;
};

struct CongenResult {
    CongenStatus status = CongenStatus::iterationLimit;
    std::optional<ChargeSchedule> schedule;  // last decoded schedule
    std::vector<IterationTrace> trace;
    ClaModel cla;
    SampleSet samples;
    std::vector<ClaKey> active;
    SimulationResult simulation;             // of the last schedule
    std::string diagnostics;
};

// Iterative constraint generation: solve the naive program, simulate, add surrogates for violated
// (node, t, sense) triples, refit every active surrogate on the enlarged sample set, re-solve.
CongenResult runCongen(const GridResponse& grid, const CongenConfig& config);

// Solves one EEV-C instance with the configured backend.
mp::Solution solveEevc(const EevcProgram& ep, const CongenConfig& config);

struct SweepPoint {
    double lambda = 0.0;
    CongenResult result;
    std::string error;  // non-empty when the run aborted
};

// One congen run per budget value, in the given order. Errors are recorded per point.
std::vector<SweepPoint> sweep(const GridResponse& grid, const std::vector<double>& lambdas, const CongenConfig& config);

// Charging time in steps: T - gamma_max, counted from the first start to the end of the horizon;
// -1 when the run produced no schedule.
int chargeTimeSteps(const ScenarioData& scenario, const CongenResult& result);

// `iter,gamma,pred_slack,actual_viol,n_constraints,wall_s`; wall_s is 0 unless timings are requested.
std::string traceToCsv(const CongenResult& result, const Provenance& prov, bool timings);
// `lambda,charge_time_steps,viol_total,viol_count,iters`
std::string sweepToCsv(const ScenarioData& scenario, const std::vector<SweepPoint>& points, const Provenance& prov);

}  // namespace evac
