#include "evac/eevc.hpp"

#include <cmath>

#include "evac/errors.hpp"

namespace evac {
namespace {

using mp::Relation;
using mp::Term;

std::string name(const char* prefix, const std::string& a, int t) { return std::string(prefix) + "_" + a + "_" + std::to_string(t); }
std::string name(const char* prefix, int t) { return std::string(prefix) + "_" + std::to_string(t); }

}  // namespace

EevcCounts eevcCounts(std::size_t evs, std::size_t tazs, int horizon, std::size_t active, bool finiteBudget) {
    const auto T = static_cast<std::size_t>(horizon);
    EevcCounts c;
    c.variables = 1 + T + tazs * T + 2 * evs * T + active;
    c.binaries = T + tazs * T + evs * T;
    c.constraints = 2 * T + evs * T + 2 * tazs * T + 2 * evs * T + tazs + active + (active > 0 && finiteBudget ? 1 : 0);
    return c;
}

EevcProgram buildProgram(const EevcInstance& inst, const ClaModel& cla) {
    if (inst.scenario == nullptr) throw InputError("EEV-C: instance has no scenario");
    const ScenarioData& sc = *inst.scenario;
    if (inst.includeGrid && inst.active.empty()) throw InputError("EEV-C: grid constraints requested but none are active");
    if (!inst.includeGrid && !inst.active.empty()) throw InputError("EEV-C: naive program cannot carry surrogate constraints");
    for (const ClaKey& key : inst.active) {
        if (!cla.contains(key)) {
            throw InputError("EEV-C: no CLA for " + sc.network().nodes()[key.node].str() + " t=" + std::to_string(key.t) +
                             " " + toString(key.sense));
        }
    }

    const int T = sc.horizon();
    const double beta = sc.beta();
    const std::size_t nTaz = sc.tazs().size();
    const std::size_t nEv = sc.evs().size();
    EevcProgram ep;
    mp::Program& p = ep.program;
    EevcLayout& L = ep.layout;

    L.gamma = p.addVariable("gamma", mp::VarKind::continuous, 0.0, T);
    for (int t = 1; t <= T; ++t) L.tau.push_back(p.addBinary(name("tau", t)));
    L.cTaz.resize(nTaz);
    for (std::size_t k = 0; k < nTaz; ++k) {
        for (int t = 1; t <= T; ++t) L.cTaz[k].push_back(p.addBinary(name("c", sc.tazs()[k].id, t)));
    }
    L.cEv.resize(nEv);
    L.battery.resize(nEv);
    for (std::size_t e = 0; e < nEv; ++e) {
        for (int t = 1; t <= T; ++t) L.cEv[e].push_back(p.addBinary(name("ch", sc.evs()[e].id, t)));
    }
    for (std::size_t e = 0; e < nEv; ++e) {
        const double l0 = sc.evs()[e].soc0;
        for (int t = 1; t <= T; ++t) L.battery[e].push_back(p.addVariable(name("L", sc.evs()[e].id, t), mp::VarKind::continuous, l0, 1.0));
    }
    for (const ClaKey& key : inst.active) {
        const std::string tag = sc.network().nodes()[key.node].str() + "_" + std::to_string(key.t);
        L.slack[key] = p.addVariable((key.sense == Sense::over ? "lp_" : "lm_") + tag);
    }

    const auto at = [](const std::vector<std::size_t>& v, int t) { return v[static_cast<std::size_t>(t - 1)]; };

    // Gamma <= t tau^t + T (1 - tau^t)
    for (int t = 1; t <= T; ++t) {
        p.addConstraint(name("start", t), {{L.gamma, 1.0}, {at(L.tau, t), static_cast<double>(T - t)}}, Relation::le, T);
    }
    // tau^t = 1 once any TAZ has charged: T |X| tau^t >= sum_x sum_{t' <= t} C_x^t', divided through by T |X|.
    const double scale = 1.0 / (static_cast<double>(T) * static_cast<double>(nTaz));
    for (int t = 1; t <= T; ++t) {
        std::vector<Term> terms{{at(L.tau, t), 1.0}};
        for (std::size_t k = 0; k < nTaz; ++k) {
            for (int s = 1; s <= t; ++s) terms.push_back({at(L.cTaz[k], s), -scale});
        }
        p.addConstraint(name("begun", t), std::move(terms), Relation::ge, 0.0);
    }
    // L^t = L^{t-1} + C^{t-1} / beta with C^0 = 0; the bounds L^t in [L^0, 1] carry the level limits.
    for (std::size_t e = 0; e < nEv; ++e) {
        const std::string& id = sc.evs()[e].id;
        p.addConstraint(name("soc", id, 1), {{at(L.battery[e], 1), 1.0}}, Relation::eq, sc.evs()[e].soc0);
        for (int t = 2; t <= T; ++t) {
            p.addConstraint(name("soc", id, t),
                            {{at(L.battery[e], t), 1.0}, {at(L.battery[e], t - 1), -1.0}, {at(L.cEv[e], t - 1), -1.0 / beta}},
                            Relation::eq, 0.0);
        }
    }
    // A TAZ keeps charging until its mean level reaches 1 and stops once it has.
    for (std::size_t k = 0; k < nTaz; ++k) {
        const std::string& id = sc.tazs()[k].id;
        const auto& evs = sc.tazEvs(k);
        const double n = static_cast<double>(evs.size());
        for (int t = 1; t <= T; ++t) {
            std::vector<Term> terms{{at(L.cTaz[k], t), 1.0}};
            if (t > 1) terms.push_back({at(L.cTaz[k], t - 1), -1.0});
            for (std::size_t e : evs) terms.push_back({at(L.battery[e], t), 1.0 / n});
            p.addConstraint(name("keep", id, t), std::move(terms), Relation::ge, 0.0);
        }
        for (int t = 1; t <= T; ++t) {
            std::vector<Term> terms{{at(L.cTaz[k], t), 1.0}};
            for (std::size_t e : evs) terms.push_back({at(L.battery[e], t), 1.0 / n});
            p.addConstraint(name("stop", id, t), std::move(terms), Relation::le, 2.0 - 1.0 / (beta * n));
        }
    }
    // An EV charges exactly when its TAZ does and it is not yet full.
    for (std::size_t e = 0; e < nEv; ++e) {
        const std::string& id = sc.evs()[e].id;
        const std::size_t k = sc.evTaz(e);
        for (int t = 1; t <= T; ++t) {
            p.addConstraint(name("follow", id, t), {{at(L.cTaz[k], t), 1.0}, {at(L.battery[e], t), -1.0}, {at(L.cEv[e], t), -1.0}},
                            Relation::le, 0.0);
            p.addConstraint(name("only", id, t), {{at(L.cEv[e], t), 1.0}, {at(L.cTaz[k], t), -1.0}}, Relation::le, 0.0);
        }
    }
    // Every EV of a TAZ is full at its departure.
    for (std::size_t k = 0; k < nTaz; ++k) {
        const auto& evs = sc.tazEvs(k);
        const int d = sc.tazs()[k].departure;
        std::vector<Term> terms;
        for (std::size_t e : evs) terms.push_back({at(L.battery[e], d), 1.0 / static_cast<double>(evs.size())});
        p.addConstraint("depart_" + sc.tazs()[k].id, std::move(terms), Relation::eq, 1.0);
    }
    // Surrogate bounds with EV demand p_k^t = R * sum of charging EVs at bus k.
    const double r = sc.ratePu();
    const double vMax = sc.config().vMax;
    const double vMin = sc.config().vMin;
    for (const ClaKey& key : inst.active) {
        const ClaFunction& f = *cla.find(key);
        if (f.a1.size() != sc.evBuses().size()) throw InputError("EEV-C: CLA dimension differs from the EV bus count");
        std::vector<Term> terms;
        for (std::size_t e = 0; e < nEv; ++e) {
            const double coef = f.a1[sc.evBusSlot(e)] * r;
            if (coef != 0.0) terms.push_back({at(L.cEv[e], key.t), coef});
        }
        const std::size_t lam = L.slack.at(key);
        const std::string tag = sc.network().nodes()[key.node].str() + "_" + std::to_string(key.t);
        if (key.sense == Sense::over) {
            terms.push_back({lam, -1.0});
            p.addConstraint("vmax_" + tag, std::move(terms), Relation::le, vMax - f.a0);
        } else {
            terms.push_back({lam, 1.0});
            p.addConstraint("vmin_" + tag, std::move(terms), Relation::ge, vMin - f.a0);
        }
    }
    if (!inst.active.empty() && std::isfinite(inst.lambdaMax)) {
        std::vector<Term> terms;
        for (const auto& [key, j] : L.slack) terms.push_back({j, 1.0});
        p.addConstraint("budget", std::move(terms), Relation::le, inst.lambdaMax);
    }
    p.setObjective(mp::ObjSense::maximize, {{L.gamma, 1.0}});
    return ep;
}

mp::MilpOptions eevcMilpOptions(const EevcProgram& ep, mp::MilpOptions base) {
    base.branchPriority.assign(ep.program.variables().size(), 0);
    for (std::size_t j : ep.layout.tau) base.branchPriority[j] = 2;
    for (const auto& row : ep.layout.cTaz) {
        for (std::size_t j : row) base.branchPriority[j] = 1;
    }
    base.objectiveGranularity = 1.0;
    return base;
}

ChargeSchedule decode(const EevcProgram& ep, const mp::Solution& sol, const EevcInstance& inst) {
    if (!sol.hasIncumbent()) throw SolverError(std::string("EEV-C: no solution to decode (status ") + mp::toString(sol.status) + ")");
    const ScenarioData& sc = *inst.scenario;
    const EevcLayout& L = ep.layout;
    const int T = sc.horizon();
    constexpr double kTol = 1e-6;
    const auto binary = [&](std::size_t j) -> std::uint8_t {
        const double x = sol.values[j];
        if (std::abs(x) <= kTol) return 0;
        if (std::abs(x - 1.0) <= kTol) return 1;
        throw ScheduleError("EEV-C: binary " + ep.program.variables()[j].name + " = " + std::to_string(x) + " is not integral");
    };

    ChargeSchedule s;
    s.horizon = T;
    s.tazCharging.assign(sc.tazs().size(), {});
    for (std::size_t k = 0; k < sc.tazs().size(); ++k) {
        for (int t = 1; t <= T; ++t) s.tazCharging[k].push_back(binary(L.cTaz[k][static_cast<std::size_t>(t - 1)]));
    }
    s.evCharging.assign(sc.evs().size(), {});
    for (std::size_t e = 0; e < sc.evs().size(); ++e) {
        for (int t = 1; t <= T; ++t) s.evCharging[e].push_back(binary(L.cEv[e][static_cast<std::size_t>(t - 1)]));
    }
    for (std::size_t j : L.tau) binary(j);
    deriveScheduleState(s, sc);

    // The solver's levels must agree with the recursion evaluated on the rounded flags.
    for (std::size_t e = 0; e < sc.evs().size(); ++e) {
        for (int t = 1; t <= T; ++t) {
            const double solver = sol.values[L.battery[e][static_cast<std::size_t>(t - 1)]];
            if (std::abs(solver - s.battery[e][static_cast<std::size_t>(t)]) > kTol) {
                throw ScheduleError("EEV-C: solver battery level of EV " + sc.evs()[e].id + " at t=" + std::to_string(t) +
                                    " disagrees with the charging flags");
            }
        }
    }
    for (const auto& [key, j] : L.slack) s.predictedSlacks[key] = std::max(0.0, sol.values[j]);

    // The recomputed start can only improve on the solver's gamma (tau may switch on early);
    // at proven optimality the two agree.
    const double solverGamma = sol.values[L.gamma];
    if (s.gammaMax + kTol < solverGamma) {
        throw ScheduleError("EEV-C: solver gamma " + std::to_string(solverGamma) + " exceeds the first charging step " +
                            std::to_string(s.gammaMax));
    }
    if (sol.status == mp::Status::optimal && std::abs(s.gammaMax - solverGamma) > kTol) {
        throw ScheduleError("EEV-C: optimal gamma " + std::to_string(solverGamma) + " differs from the first charging step " +
                            std::to_string(s.gammaMax));
    }
    validateSchedule(sc, s, inst.includeGrid ? inst.lambdaMax : mp::kInf);
    return s;
}

}  // namespace evac
