#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evac/grid_response.hpp"
#include "evac/mathprog.hpp"
#include "evac/netmodel.hpp"
#include "evac/types.hpp"

namespace evac {

// EV charging samples shared across time steps, plus squared-voltage targets per (node, t).
struct SampleSet {
    std::vector<std::vector<std::uint8_t>> evOn;  // [m][ev]
    std::vector<std::vector<double>> p;           // [m][k], per-unit EV bus demand
    std::map<std::pair<std::size_t, int>, std::vector<double>> targets;  // (node, t) -> v[m]

    std::size_t size() const { return p.size(); }
    const std::vector<double>* target(std::size_t node, int t) const;
};

// max(2|K| + 10, 30)
std::size_t defaultSampleCount(const ScenarioData& scenario);

// Column 1 all off, column 2 all on, the rest Bernoulli(0.5) per EV from a seeded generator.
SampleSet drawSamples(const ScenarioData& scenario, std::size_t M, std::uint64_t seed);

// Fills (or extends to the current sample count) targets for every node x time pair.
// Non-convergence is reported as PowerFlowError naming sample and time step.
void computeTargets(const GridResponse& grid, SampleSet& samples, std::span<const std::size_t> nodes,
                    std::span<const int> times, int jobs = 1);

// Appends charging patterns as new columns; existing targets become stale until computeTargets runs.
void appendSamples(SampleSet& samples, const ScenarioData& scenario, const std::vector<std::vector<std::uint8_t>>& evOn);

struct ClaFunction {
    std::size_t node = 0;
    int t = 0;
    Sense sense = Sense::over;
    double a0 = 0.0;
    std::vector<double> a1;  // over EV buses K
    double objective = 0.0;  // l1 residual on the training samples

    ClaKey key() const { return ClaKey{node, t, sense}; }
};

// Constrained l1 regression of targets v on rows of p (one row per sample, one column per EV bus).
// Over-estimators satisfy prediction >= v, under-estimators prediction <= v on every row.
ClaFunction fitClaData(const std::vector<std::vector<double>>& p, std::span<const double> v, Sense sense,
                       const mp::LpOptions& options = {});
ClaFunction fitCla(const SampleSet& samples, std::size_t node, int t, Sense sense, const mp::LpOptions& options = {});

double predict(const ClaFunction& f, std::span<const double> p);

class ClaModel {
public:
    std::uint64_t seed = 0;
    std::size_t sampleCount = 0;
    std::string scenarioHash;

    void insert(ClaFunction f);
    const ClaFunction* find(const ClaKey& key) const;
    bool contains(const ClaKey& key) const { return find(key) != nullptr; }
    const std::map<ClaKey, ClaFunction>& functions() const { return functions_; }
    std::size_t size() const { return functions_.size(); }

private:
    std::map<ClaKey, ClaFunction> functions_;
};

// JSON with a provenance object and a list of {node, t, sense, a0, a1:{bus: coeff}} records.
std::string claModelToJson(const ClaModel& model, const ScenarioData& scenario, const std::string& provenanceJson);
ClaModel claModelFromJson(std::string_view text, const ScenarioData& scenario);

}  // namespace evac
