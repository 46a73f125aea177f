#include "evac/powerflow.hpp"

#include <algorithm>
#include <cmath>

#include "evac/errors.hpp"

namespace evac {

PowerFlowSolver::PowerFlowSolver(const NetworkModel& net, PowerFlowOptions options)
    : net_(&net), options_(options), branchOfBus_(net.buses().size(), -1) {
    for (std::size_t b : net.breadthFirstOrder()) {
        const int lineIdx = net.parentLine(b);
        if (lineIdx < 0) continue;
        const Line& ln = net.lines()[static_cast<std::size_t>(lineIdx)];
        Branch br;
        br.parent = net.parentBus(b);
        br.child = b;
        br.phases = ln.phases;
        const auto ph = ln.phases.list();
        for (std::size_t r = 0; r < ph.size(); ++r) {
            for (std::size_t c = 0; c < ph.size(); ++c) {
                br.z[static_cast<int>(ph[r])][static_cast<int>(ph[c])] =
                    ln.impedance(static_cast<int>(r), static_cast<int>(c));
            }
        }
        branchOfBus_[b] = static_cast<int>(branches_.size());
        branches_.push_back(br);
    }
}

std::vector<std::array<Complex, 3>> PowerFlowSolver::branchCurrents(std::span<const Complex> phasor,
                                                                    std::span<const Complex> demandPu) const {
    const NetworkModel& net = *net_;
    std::vector<std::array<Complex, 3>> current(net.buses().size());
    const auto& order = net.breadthFirstOrder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::size_t b = *it;
        for (Phase p : net.bus(b).phases.list()) {
            const auto i = static_cast<std::size_t>(net.nodeIndex(b, p));
            if (demandPu[i] != Complex(0.0, 0.0)) current[b][static_cast<int>(p)] += std::conj(demandPu[i] / phasor[i]);
        }
        if (b != net.sourceIndex()) {
            const std::size_t parent = net.parentBus(b);
            for (int p = 0; p < 3; ++p) current[parent][p] += current[b][p];
        }
    }
    return current;
}

VoltageSolution PowerFlowSolver::solve(std::span<const Complex> demandPu) const {
    const NetworkModel& net = *net_;
    if (demandPu.size() != net.nodes().size()) throw InputError("power flow: demand vector does not match node count");

    VoltageSolution sol;
    sol.phasor.resize(net.nodes().size());
    for (std::size_t i = 0; i < net.nodes().size(); ++i) {
        sol.phasor[i] = net.sourceVoltage()[static_cast<int>(net.nodes()[i].phase)];
    }

    std::vector<Complex> next = sol.phasor;
    for (int iter = 1; iter <= options_.maxIterations; ++iter) {
        const auto current = branchCurrents(sol.phasor, demandPu);
        for (const Branch& br : branches_) {
            for (Phase p : net.bus(br.child).phases.list()) {
                const int pi = static_cast<int>(p);
                Complex drop{};
                for (int q = 0; q < 3; ++q) drop += br.z[pi][q] * current[br.child][q];
                next[static_cast<std::size_t>(net.nodeIndex(br.child, p))] =
                    next[static_cast<std::size_t>(net.nodeIndex(br.parent, p))] - drop;
            }
        }
        double mismatch = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < next.size(); ++i) {
            const double d = std::abs(next[i] - sol.phasor[i]);
            if (!std::isfinite(d)) finite = false;
            mismatch = std::max(mismatch, d);
        }
        sol.phasor.swap(next);
        next = sol.phasor;
        sol.iterations = iter;
        sol.mismatch = finite ? mismatch : INFINITY;
        if (!finite) break;
        if (mismatch <= options_.tolerance) {
            sol.converged = true;
            break;
        }
    }
    sol.v2.resize(sol.phasor.size());
    for (std::size_t i = 0; i < sol.phasor.size(); ++i) sol.v2[i] = std::norm(sol.phasor[i]);
    return sol;
}

PowerBalance PowerFlowSolver::balance(const VoltageSolution& sol, std::span<const Complex> demandPu) const {
    const NetworkModel& net = *net_;
    const auto current = branchCurrents(sol.phasor, demandPu);
    PowerBalance pb;
    const std::size_t src = net.sourceIndex();
    for (Phase p : net.bus(src).phases.list()) {
        const auto i = static_cast<std::size_t>(net.nodeIndex(src, p));
        pb.sourceInjection += sol.phasor[i] * std::conj(current[src][static_cast<int>(p)]);
    }
    for (const Complex& s : demandPu) pb.totalLoad += s;
    for (const Branch& br : branches_) {
        for (int p = 0; p < 3; ++p) {
            Complex drop{};
            for (int q = 0; q < 3; ++q) drop += br.z[p][q] * current[br.child][q];
            pb.totalLosses += drop * std::conj(current[br.child][p]);
        }
    }
    return pb;
}

VoltageSolution solvePf(const NetworkModel& net, const InjectionSnapshot& snapshot, PowerFlowOptions options) {
    return PowerFlowSolver(net, options).solve(snapshot.demandPu);
}

InjectionSnapshot makeSnapshot(const ScenarioData& scenario, int t, std::span<const std::uint8_t> charging) {
    if (charging.size() != scenario.evs().size()) throw InputError("snapshot: charging flags do not match EV count");
    InjectionSnapshot snap{t, scenario.backgroundPu(t)};
    const double rate = scenario.ratePu();
    for (std::size_t e = 0; e < charging.size(); ++e) {
        if (charging[e]) snap.demandPu[scenario.evNodeIndex(e)] += rate;
    }
    return snap;
}

}  // namespace evac
