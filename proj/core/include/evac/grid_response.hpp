#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evac/netmodel.hpp"
#include "evac/powerflow.hpp"

namespace evac {

// Maps (time step, set of charging EVs) to the squared voltage magnitude at every node.
// The production implementation runs a power flow; tests substitute an exactly-affine map.
// Implementations must be safe to call concurrently.
class GridResponse {
public:
    virtual ~GridResponse() = default;

    virtual const ScenarioData& scenario() const = 0;
    // Throws PowerFlowError when the underlying model does not converge.
    virtual std::vector<double> squaredVoltages(int t, std::span<const std::uint8_t> charging) const = 0;
};

class PowerFlowResponse final : public GridResponse {
public:
    explicit PowerFlowResponse(const ScenarioData& scenario, PowerFlowOptions options = {});

    const ScenarioData& scenario() const override { return *scenario_; }
    std::vector<double> squaredVoltages(int t, std::span<const std::uint8_t> charging) const override;

private:
    const ScenarioData* scenario_;
    PowerFlowSolver solver_;
};

// v[node] = base[t][node] + sum_k sensitivity[node][k] * p_k, with p_k the EV demand (p.u.) at EV bus k.
class AffineResponse final : public GridResponse {
public:
    AffineResponse(const ScenarioData& scenario, std::vector<std::vector<double>> base,
                   std::vector<std::vector<double>> sensitivity);

    const ScenarioData& scenario() const override { return *scenario_; }
    std::vector<double> squaredVoltages(int t, std::span<const std::uint8_t> charging) const override;

private:
    const ScenarioData* scenario_;
    std::vector<std::vector<double>> base_;
    std::vector<std::vector<double>> sensitivity_;
};

// Per-EV-bus demand (p.u.) for a set of charging EVs, indexed like ScenarioData::evBuses().
std::vector<double> busDemandPu(const ScenarioData& scenario, std::span<const std::uint8_t> charging);

}  // namespace evac
