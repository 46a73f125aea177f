#include "evac/cla.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "evac/errors.hpp"
#include "evac/parallel.hpp"

namespace evac {

const std::vector<double>* SampleSet::target(std::size_t node, int t) const {
    const auto it = targets.find({node, t});
    return it == targets.end() ? nullptr : &it->second;
}

std::size_t defaultSampleCount(const ScenarioData& scenario) {
    return std::max<std::size_t>(2 * scenario.evBuses().size() + 10, 30);
}

SampleSet drawSamples(const ScenarioData& scenario, std::size_t M, std::uint64_t seed) {
    const std::size_t K = scenario.evBuses().size();
    if (M < K + 2) {
        throw InputError("sample count M=" + std::to_string(M) + " is too small; need at least |K|+2=" + std::to_string(K + 2));
    }
    const std::size_t nEv = scenario.evs().size();
    std::vector<std::vector<std::uint8_t>> on;
    std::mt19937_64 rng(seed);
    for (std::size_t m = 0; m < M; ++m) {
        std::vector<std::uint8_t> col(nEv, 0);
        if (m == 1) {
            std::fill(col.begin(), col.end(), 1);
        } else if (m > 1) {
            // Top bit of each draw: a fair coin that does not depend on the library's distribution code.
            for (auto& c : col) c = static_cast<std::uint8_t>(rng() >> 63);
        }
        on.push_back(std::move(col));
    }
    SampleSet s;
    appendSamples(s, scenario, on);
    return s;
}

void appendSamples(SampleSet& samples, const ScenarioData& scenario, const std::vector<std::vector<std::uint8_t>>& evOn) {
    for (const auto& col : evOn) {
        if (col.size() != scenario.evs().size()) throw InputError("appendSamples: pattern length differs from EV count");
        samples.evOn.push_back(col);
        samples.p.push_back(busDemandPu(scenario, col));
    }
}

void computeTargets(const GridResponse& grid, SampleSet& samples, std::span<const std::size_t> nodes,
                    std::span<const int> times, int jobs) {
    const std::size_t M = samples.size();
    struct Task {
        int t;
        std::size_t m;
    };
    std::vector<Task> tasks;
    for (int t : times) {
        std::size_t have = M;
        for (std::size_t node : nodes) {
            const auto it = samples.targets.find({node, t});
            have = std::min(have, it == samples.targets.end() ? std::size_t{0} : it->second.size());
        }
        for (std::size_t m = have; m < M; ++m) tasks.push_back(Task{t, m});
    }
    std::vector<std::vector<double>> v2(tasks.size());
    parallelFor(tasks.size(), jobs, [&](std::size_t k) {
        try {
            v2[k] = grid.squaredVoltages(tasks[k].t, samples.evOn[tasks[k].m]);
        } catch (const PowerFlowError& e) {
            throw PowerFlowError("sample " + std::to_string(tasks[k].m + 1) + ": " + e.what(), tasks[k].t, e.mismatch());
        }
    });
    for (std::size_t k = 0; k < tasks.size(); ++k) {
        for (std::size_t node : nodes) {
            auto& vec = samples.targets[{node, tasks[k].t}];
            if (vec.size() > tasks[k].m) continue;
            vec.resize(tasks[k].m + 1);
            vec[tasks[k].m] = v2[k][node];
        }
    }
}

ClaFunction fitClaData(const std::vector<std::vector<double>>& p, std::span<const double> v, Sense sense,
                       const mp::LpOptions& options) {
    const std::size_t M = p.size();
    if (M == 0 || v.size() != M) throw InputError("fit: target count differs from sample count");
    const std::size_t K = p.front().size();
    for (const auto& row : p) {
        if (row.size() != K) throw InputError("fit: ragged sample matrix");
    }

    // min sum r  s.t.  a0 + p_m . a1 - v_m = r_m  with r_m >= 0 (over) or r_m <= 0 (under).
    mp::Program lp;
    const std::size_t a0 = lp.addVariable("a0", mp::VarKind::continuous, -mp::kInf, mp::kInf);
    std::vector<std::size_t> a1(K);
    for (std::size_t k = 0; k < K; ++k) a1[k] = lp.addVariable("a1_" + std::to_string(k), mp::VarKind::continuous, -mp::kInf, mp::kInf);
    std::vector<mp::Term> objective;
    const double sign = sense == Sense::over ? 1.0 : -1.0;
    for (std::size_t m = 0; m < M; ++m) {
        const std::size_t r = lp.addVariable("r_" + std::to_string(m));
        objective.push_back({r, 1.0});
        std::vector<mp::Term> terms{{a0, 1.0}};
        for (std::size_t k = 0; k < K; ++k) {
            if (p[m][k] != 0.0) terms.push_back({a1[k], p[m][k]});
        }
        terms.push_back({r, -sign});
        lp.addConstraint("fit_" + std::to_string(m), std::move(terms), mp::Relation::eq, v[m]);
    }
    lp.setObjective(mp::ObjSense::minimize, std::move(objective));
    const mp::Solution sol = mp::solveLp(lp, options);
    if (sol.status != mp::Status::optimal) {
        throw SolverError(std::string("CLA fit LP ended with status ") + mp::toString(sol.status) +
                          (sol.diagnostics.empty() ? "" : " (" + sol.diagnostics + ")"));
    }

    ClaFunction f;
    f.sense = sense;
    f.a0 = sol.values[a0];
    f.a1.resize(K);
    for (std::size_t k = 0; k < K; ++k) f.a1[k] = sol.values[a1[k]];
    // Remove the residual infeasibility the simplex tolerates so the bound holds exactly on the data.
    // Rounding in the shifted sum can leave an ulp of violation, hence the loop.
    for (;;) {
        double gap = 0.0;
        for (std::size_t m = 0; m < M; ++m) gap = std::max(gap, sign * (v[m] - predict(f, p[m])));
        if (gap <= 0.0) break;
        const double moved = f.a0 + sign * gap;
        f.a0 = moved != f.a0 ? moved : std::nextafter(f.a0, sign * mp::kInf);
    }
    f.objective = 0.0;
    for (std::size_t m = 0; m < M; ++m) f.objective += std::abs(predict(f, p[m]) - v[m]);
    return f;
}

ClaFunction fitCla(const SampleSet& samples, std::size_t node, int t, Sense sense, const mp::LpOptions& options) {
    const std::vector<double>* v = samples.target(node, t);
    if (v == nullptr || v->size() != samples.size()) {
        throw InputError("fit: targets for node " + std::to_string(node) + " at t=" + std::to_string(t) + " are missing or stale");
    }
    ClaFunction f = fitClaData(samples.p, *v, sense, options);
    f.node = node;
    f.t = t;
    return f;
}

double predict(const ClaFunction& f, std::span<const double> p) {
    if (p.size() != f.a1.size()) {
        throw InputError("predict: demand vector has " + std::to_string(p.size()) + " entries, expected " + std::to_string(f.a1.size()));
    }
    double v = f.a0;
    for (std::size_t k = 0; k < p.size(); ++k) v += f.a1[k] * p[k];
    return v;
}

void ClaModel::insert(ClaFunction f) {
    const ClaKey key = f.key();
    functions_.insert_or_assign(key, std::move(f));
}

const ClaFunction* ClaModel::find(const ClaKey& key) const {
    const auto it = functions_.find(key);
    return it == functions_.end() ? nullptr : &it->second;
}

}  // namespace evac
