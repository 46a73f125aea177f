#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evac/netmodel.hpp"

namespace evac {

// Per-node complex demand (p.u.) at one time step.
struct InjectionSnapshot {
    int t = 0;
    std::vector<Complex> demandPu;
};

struct VoltageSolution {
    std::vector<Complex> phasor;  // per node, p.u.
    std::vector<double> v2;       // |phasor|^2
    bool converged = false;
    int iterations = 0;
    double mismatch = 0.0;        // last infinity-norm phasor change
};

struct PowerFlowOptions {
    double tolerance = 1e-8;
    int maxIterations = 100;
};

struct PowerBalance {
    Complex sourceInjection;
    Complex totalLoad;
    Complex totalLosses;

    double residual() const { return std::abs(sourceInjection - totalLoad - totalLosses); }
};

// Forward-backward sweep for unbalanced radial feeders with constant-power loads.
// Thread-safe: solve() is const and keeps no shared scratch state.
class PowerFlowSolver {
public:
    explicit PowerFlowSolver(const NetworkModel& net, PowerFlowOptions options = {});

    VoltageSolution solve(std::span<const Complex> demandPu) const;
    PowerBalance balance(const VoltageSolution& sol, std::span<const Complex> demandPu) const;

    const NetworkModel& network() const { return *net_; }

private:
    struct Branch {
        std::size_t parent;
        std::size_t child;
        std::array<std::array<Complex, 3>, 3> z{};  // zero outside the line's phases
        PhaseSet phases;
    };

    // Branch currents per bus (sum of the bus's subtree demand), indexed [bus][phase].
    std::vector<std::array<Complex, 3>> branchCurrents(std::span<const Complex> phasor,
                                                       std::span<const Complex> demandPu) const;

    const NetworkModel* net_;
    PowerFlowOptions options_;
    std::vector<int> branchOfBus_;
    std::vector<Branch> branches_;
};

VoltageSolution solvePf(const NetworkModel& net, const InjectionSnapshot& snapshot, PowerFlowOptions options = {});

// Background at t plus unity-power-factor EV demand R for every EV flagged in `charging`.
InjectionSnapshot makeSnapshot(const ScenarioData& scenario, int t, std::span<const std::uint8_t> charging);

}  // namespace evac
