#include "evac/congen.hpp"

#include <chrono>
#include <set>

#include "evac/csv.hpp"
#include "evac/errors.hpp"
#include "evac/parallel.hpp"

namespace evac {

const char* toString(CongenStatus s) {
    switch (s) {
        case CongenStatus::converged: return "converged";
        case CongenStatus::infeasible: return "infeasible";
        case CongenStatus::iterationLimit: return "iteration_limit";
    }
    return "unknown";
}

mp::Solution solveEevc(const EevcProgram& ep, const CongenConfig& config) {
    if (!config.externalSolver.empty()) {
        const std::filesystem::path dir = config.workDir.empty() ? std::filesystem::temp_directory_path() / "evacharge" : std::filesystem::path(config.workDir);
        return mp::solveExternal(ep.program, config.externalSolver, dir);
    }
    return mp::solveMilp(ep.program, eevcMilpOptions(ep, config.milp));
}

CongenResult runCongen(const GridResponse& grid, const CongenConfig& config) {
    const ScenarioData& sc = grid.scenario();
    if (config.maxIterations < 1) throw InputError("congen: max iterations must be at least 1");
    const std::size_t M = config.sampleCount == 0 ? defaultSampleCount(sc) : config.sampleCount;

    CongenResult result;
    result.cla.seed = config.seed;
    result.cla.sampleCount = M;
    result.cla.scenarioHash = scenarioHash(sc);
    result.samples = drawSamples(sc, M, config.seed);
    std::set<std::vector<std::uint8_t>> seenPatterns(result.samples.evOn.begin(), result.samples.evOn.end());
    std::set<ClaKey> active;

    for (int iter = 1; iter <= config.maxIterations; ++iter) {
        const auto start = std::chrono::steady_clock::now();
        IterationTrace tr;
        tr.iteration = iter;
        tr.constraints = active.size();

        EevcInstance inst;
        inst.scenario = &sc;
        inst.active.assign(active.begin(), active.end());
        inst.lambdaMax = config.lambdaMax;
        inst.includeGrid = !active.empty();
        const EevcProgram ep = buildProgram(inst, result.cla);
        const mp::Solution sol = solveEevc(ep, config);
        tr.milpNodes = sol.nodes;
        if (sol.status == mp::Status::infeasible) {
            result.status = CongenStatus::infeasible;
            result.diagnostics = "EEV-C program is infeasible at iteration " + std::to_string(iter);
            tr.gamma = -1;
            result.schedule.reset();
            tr.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.trace.push_back(tr);
            return result;
        }
        if (sol.status == mp::Status::unbounded) throw SolverError("EEV-C program reported unbounded");
        if (!sol.hasIncumbent()) {
            throw SolverError("EEV-C solve stopped without a feasible schedule at iteration " + std::to_string(iter) +
                              (sol.diagnostics.empty() ? "" : ": " + sol.diagnostics));
        }
        if (sol.status == mp::Status::limit) {
            result.diagnostics = "iteration " + std::to_string(iter) + ": solver limit, using incumbent (" + sol.diagnostics + ")";
        }
        ChargeSchedule schedule = decode(ep, sol, inst);
        SimulationResult sim = simulateSchedule(grid, schedule, config.jobs);

        tr.gamma = schedule.gammaMax;
        tr.predictedSlack = schedule.predictedSlackTotal();
        tr.actualViolation = sim.report.total();
        tr.violationCount = sim.report.count();
        result.active.assign(active.begin(), active.end());
        result.schedule = std::move(schedule);
        result.simulation = std::move(sim);

        const bool done = withinBudget(result.simulation.report, config.lambdaMax) || config.naive;
        if (done || iter == config.maxIterations) {
            result.status = done ? CongenStatus::converged : CongenStatus::iterationLimit;
            tr.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.trace.push_back(tr);
            return result;
        }

        // Activate a surrogate for every violated (node, t, sense) and add the schedule's charging
        // patterns at the violated steps as new samples.
        std::set<int> violatedSteps;
        for (const Violation& v : result.simulation.report.entries) {
            const ClaKey key{v.node, v.t, v.kind};
            if (active.insert(key).second) tr.added.push_back(key);
            violatedSteps.insert(v.t);
        }
        std::vector<std::vector<std::uint8_t>> fresh;
        for (int t : violatedSteps) {
            auto pattern = result.schedule->chargingAt(t);
            if (seenPatterns.insert(pattern).second) fresh.push_back(std::move(pattern));
        }
        appendSamples(result.samples, sc, fresh);

        std::map<int, std::vector<std::size_t>> nodesAt;
        for (const ClaKey& key : active) {
            auto& nodes = nodesAt[key.t];
            if (nodes.empty() || nodes.back() != key.node) nodes.push_back(key.node);
        }
        for (const auto& [t, nodes] : nodesAt) {
            const int times[] = {t};
            computeTargets(grid, result.samples, nodes, times, config.jobs);
        }
        const std::vector<ClaKey> keys(active.begin(), active.end());
        std::vector<ClaFunction> fits(keys.size());
        parallelFor(keys.size(), config.jobs, [&](std::size_t i) {
            fits[i] = fitCla(result.samples, keys[i].node, keys[i].t, keys[i].sense, config.milp.lp);
        });
        for (ClaFunction& f : fits) result.cla.insert(std::move(f));
        result.cla.sampleCount = result.samples.size();

        tr.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.trace.push_back(tr);
    }
    return result;  // not reached
}

std::vector<SweepPoint> sweep(const GridResponse& grid, const std::vector<double>& lambdas, const CongenConfig& config) {
    std::vector<SweepPoint> out;
    for (double lambda : lambdas) {
        SweepPoint pt;
        pt.lambda = lambda;
        CongenConfig cfg = config;
        cfg.lambdaMax = lambda;
        try {
            pt.result = runCongen(grid, cfg);
        } catch (const Error& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

int chargeTimeSteps(const ScenarioData& scenario, const CongenResult& result) {
    if (!result.schedule) return -1;
    return scenario.horizon() - result.schedule->gammaMax;
}

std::string traceToCsv(const CongenResult& result, const Provenance& prov, bool timings) {
    std::string out = prov.csvHeader() + "iter,gamma,pred_slack,actual_viol,n_constraints,wall_s\n";
    for (const IterationTrace& tr : result.trace) {
        out += std::to_string(tr.iteration) + "," + (tr.gamma < 0 ? std::string() : std::to_string(tr.gamma)) + "," +
               formatExact(tr.predictedSlack) + "," + formatExact(tr.actualViolation) + "," + std::to_string(tr.constraints) + "," +
               (timings ? formatNumber(tr.wallSeconds, 6) : std::string("0")) + "\n";
    }
    return out;
}

std::string sweepToCsv(const ScenarioData& scenario, const std::vector<SweepPoint>& points, const Provenance& prov) {
    std::string out = prov.csvHeader() + "lambda,charge_time_steps,viol_total,viol_count,iters\n";
    for (const SweepPoint& pt : points) {
        out += formatExact(pt.lambda) + ",";
        if (!pt.error.empty() || !pt.result.schedule) {
            out += ",,," + std::to_string(pt.result.trace.size()) + "\n";
            continue;
        }
        const auto& report = pt.result.simulation.report;
        out += std::to_string(chargeTimeSteps(scenario, pt.result)) + "," + formatExact(report.total()) + "," +
               std::to_string(report.count()) + "," + std::to_string(pt.result.trace.size()) + "\n";
    }
    return out;
}

}  // namespace evac
