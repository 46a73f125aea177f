#include "evac/grid_response.hpp"

#include "evac/errors.hpp"

namespace evac {

std::vector<double> busDemandPu(const ScenarioData& scenario, std::span<const std::uint8_t> charging) {
    std::vector<double> p(scenario.evBuses().size(), 0.0);
    const double rate = scenario.ratePu();
    for (std::size_t e = 0; e < charging.size(); ++e) {
        if (charging[e]) p[scenario.evBusSlot(e)] += rate;
    }
    return p;
}

PowerFlowResponse::PowerFlowResponse(const ScenarioData& scenario, PowerFlowOptions options)
    : scenario_(&scenario), solver_(scenario.network(), options) {}

std::vector<double> PowerFlowResponse::squaredVoltages(int t, std::span<const std::uint8_t> charging) const {
    const InjectionSnapshot snap = makeSnapshot(*scenario_, t, charging);
    VoltageSolution sol = solver_.solve(snap.demandPu);
    if (!sol.converged) {
        throw PowerFlowError("power flow did not converge at t=" + std::to_string(t) + " (mismatch " +
                                 std::to_string(sol.mismatch) + " after " + std::to_string(sol.iterations) + " iterations)",
                             t, sol.mismatch);
    }
    return std::move(sol.v2);
}

AffineResponse::AffineResponse(const ScenarioData& scenario, std::vector<std::vector<double>> base,
                               std::vector<std::vector<double>> sensitivity)
    : scenario_(&scenario), base_(std::move(base)), sensitivity_(std::move(sensitivity)) {
    const std::size_t nodes = scenario.network().nodes().size();
    if (base_.size() != static_cast<std::size_t>(scenario.horizon())) throw InputError("affine response: base needs T rows");
    for (const auto& row : base_) {
        if (row.size() != nodes) throw InputError("affine response: base row must cover every node");
    }
    if (sensitivity_.size() != nodes) throw InputError("affine response: sensitivity needs one row per node");
    for (const auto& row : sensitivity_) {
        if (row.size() != scenario.evBuses().size()) throw InputError("affine response: sensitivity row must cover EV buses");
    }
}

std::vector<double> AffineResponse::squaredVoltages(int t, std::span<const std::uint8_t> charging) const {
    const auto p = busDemandPu(*scenario_, charging);
    std::vector<double> v = base_[static_cast<std::size_t>(t - 1)];
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t k = 0; k < p.size(); ++k) v[i] += sensitivity_[i][k] * p[k];
    }
    return v;
}

}  // namespace evac
