#include "evac/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "evac/errors.hpp"
#include "evac/powerflow.hpp"

namespace evac {
namespace {

// Draws that do not depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::mt19937_64 engine_;
};

double rawShape(double hour) {
    const auto bump = [&](double centre, double width) {
        double d = std::fmod(std::abs(hour - centre), 24.0);
        d = std::min(d, 24.0 - d);
        return std::exp(-(d / width) * (d / width));
    };
    return 0.35 + 0.15 * bump(8.0, 2.0) + 0.6 * bump(18.0, 3.0);
}

bool violationFree(const PowerFlowSolver& solver, const ScenarioData& base, double scale) {
    const ScenarioConfig& c = base.config();
    for (int t = 1; t <= c.horizon; ++t) {
        std::vector<Complex> d = base.backgroundPu(t);
        for (auto& x : d) x *= scale;
        const VoltageSolution sol = solver.solve(d);
        if (!sol.converged) return false;
        for (double v : sol.v2) {
            if (v > c.vMax || v < c.vMin) return false;
        }
    }
    return true;
}

}  // namespace

PhasePattern parsePhasePattern(std::string_view s) {
    if (s == "single") return PhasePattern::single;
    if (s == "three") return PhasePattern::three;
    if (s == "mixed") return PhasePattern::mixed;
    throw InputError("unknown phase pattern '" + std::string(s) + "' (expected single, three or mixed)");
}

const char* toString(PhasePattern p) {
    switch (p) {
        case PhasePattern::single: return "single";
        case PhasePattern::three: return "three";
        case PhasePattern::mixed: return "mixed";
    }
    return "unknown";
}

double summerLoadShape(double hour) {
    static const double peak = [] {
        double m = 0.0;
        for (int i = 0; i < 24 * 60; ++i) m = std::max(m, rawShape(i / 60.0));
        return m;
    }();
    return rawShape(hour) / peak;
}

ScenarioData generateSyntheticFeeder(const FeederSpec& spec) {
    if (spec.buses < 2) throw InputError("synthetic feeder needs at least 2 buses");
    if (spec.tazs < 1 || spec.evsPerTaz < 1) throw InputError("synthetic feeder needs at least one TAZ with one EV");
    if (!(spec.loadFactor > 0.0 && spec.loadFactor <= 1.0)) throw InputError("load factor must lie in (0, 1]");
    const ScenarioConfig& cfg = spec.config;
    const int T = cfg.horizon;
    Rng rng(spec.seed);

    // Topology: each bus hangs off one of the two most recent buses, giving a trunk with short laterals.
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<int> depth(static_cast<std::size_t>(spec.buses), 0);
    buses.push_back(Bus{"b0", spec.phases == PhasePattern::single ? PhaseSet::fromString("a") : PhaseSet::all()});
    for (int i = 1; i < spec.buses; ++i) {
        const int parent = rng.integer(std::max(0, i - 2), i - 1);
        depth[static_cast<std::size_t>(i)] = depth[static_cast<std::size_t>(parent)] + 1;
        const PhaseSet up = buses[static_cast<std::size_t>(parent)].phases;
        PhaseSet ph = up;
        if (spec.phases == PhasePattern::mixed && up.size() == 3 && i > spec.buses / 2 && rng.uniform() < 0.5) {
            const auto list = up.list();
            ph = PhaseSet();
            ph.insert(list[static_cast<std::size_t>(rng.integer(0, static_cast<int>(list.size()) - 1))]);
        } else if (spec.phases == PhasePattern::mixed && up.size() < 3) {
            ph = up;
        }
        buses.push_back(Bus{"b" + std::to_string(i), ph});

        const double len = rng.uniform(0.5, 1.5) * spec.impedanceScale;
        const Complex self(0.03 * len, 0.06 * len);
        const Complex mutual(0.01 * len, 0.025 * len);
        const int n = ph.size();
        std::vector<Complex> z(static_cast<std::size_t>(n * n));
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) z[static_cast<std::size_t>(r * n + c)] = r == c ? self : mutual;
        }
        lines.push_back(Line{"b" + std::to_string(parent), "b" + std::to_string(i), ph, std::move(z)});
    }
    NetworkModel net(buses, lines, "b0", balancedSourceVoltage(), spec.baseKv, spec.baseKva);

    // Background: per-node amplitude times the daily shape, power factor about 0.95.
    const std::size_t nNodes = net.nodes().size();
    std::vector<double> amplitude(nNodes, 0.0);
    for (std::size_t i = 0; i < nNodes; ++i) {
        if (net.nodes()[i].bus == "b0") continue;
        amplitude[i] = rng.uniform(20.0, 80.0);
    }
    std::vector<std::vector<Complex>> background(static_cast<std::size_t>(T), std::vector<Complex>(nNodes));
    for (int t = 1; t <= T; ++t) {
        const double shape = summerLoadShape(spec.startHour + 0.25 * (t - 1));
        for (std::size_t i = 0; i < nNodes; ++i) {
            const double jitter = amplitude[i] == 0.0 ? 0.0 : rng.uniform(0.97, 1.03);
            const double p = amplitude[i] * shape * jitter;
            background[static_cast<std::size_t>(t - 1)][i] = Complex(p, 0.33 * p);
        }
    }

    // TAZs, EVs and their initial charge.
    std::vector<Taz> tazs;
    for (int k = 0; k < spec.tazs; ++k) {
        int d = 0;
        if (!spec.departures.empty()) {
            if (spec.departures.size() != static_cast<std::size_t>(spec.tazs)) throw InputError("one departure per TAZ required");
            d = spec.departures[static_cast<std::size_t>(k)];
        } else {
            d = T - (spec.tazs - 1 - k) * std::max(1, T / (4 * spec.tazs));
        }
        tazs.push_back(Taz{"z" + std::to_string(k + 1), d});
    }
    std::vector<std::size_t> hosts;
    int deepest = 0;
    for (std::size_t i = 0; i < nNodes; ++i) {
        const auto b = *net.busIndex(net.nodes()[i].bus);
        if (b != net.sourceIndex()) deepest = std::max(deepest, depth[b]);
    }
    for (std::size_t i = 0; i < nNodes; ++i) {
        const auto b = *net.busIndex(net.nodes()[i].bus);
        if (b == net.sourceIndex()) continue;
        if (spec.evsAtFarEnd && depth[b] < deepest) continue;
        hosts.push_back(i);
    }
    const int beta = cfg.beta;
    const int maxSteps = spec.maxSteps > 0 ? spec.maxSteps : std::max(1, beta / 2);
    std::vector<Ev> evs;
    for (int k = 0; k < spec.tazs; ++k) {
        const int d = tazs[static_cast<std::size_t>(k)].departure;
        for (int h = 0; h < spec.evsPerTaz; ++h) {
            const std::size_t node = hosts[static_cast<std::size_t>(rng.integer(0, static_cast<int>(hosts.size()) - 1))];
            int steps = rng.integer(std::min(spec.minSteps, maxSteps), maxSteps);
            steps = std::clamp(steps, 0, std::min(beta, d - 1));
            const double soc0 = static_cast<double>(beta - steps) / beta;
            evs.push_back(Ev{"e" + std::to_string(k + 1) + "_" + std::to_string(h + 1), tazs[static_cast<std::size_t>(k)].id,
                             net.nodes()[node], soc0});
        }
    }

    ScenarioData base(net, cfg, background, tazs, evs);
    const PowerFlowSolver solver(base.network());
    double hi = 1.0;
    while (violationFree(solver, base, hi) && hi < 64.0) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (violationFree(solver, base, mid) ? lo : hi) = mid;
    }
    double scale = lo * spec.loadFactor;
    while (!violationFree(solver, base, scale)) scale *= 0.95;
    for (auto& row : background) {
        for (auto& x : row) x *= scale;
    }
    return ScenarioData(std::move(net), cfg, std::move(background), std::move(tazs), std::move(evs));
}

}  // namespace evac
