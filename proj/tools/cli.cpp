#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "evac/cla.hpp"
#include "evac/congen.hpp"
#include "evac/csv.hpp"
#include "evac/errors.hpp"
#include "evac/grid_response.hpp"
#include "evac/hashing.hpp"
#include "evac/netmodel.hpp"
#include "evac/oracle.hpp"
#include "evac/powerflow.hpp"
#include "evac/provenance.hpp"
#include "evac/schedule.hpp"
#include "evac/simulate.hpp"
#include "evac/synthetic.hpp"

namespace evac::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kSolverEnv = "EVAC_EXTERNAL_SOLVER";

// Bad flag combinations and values detected after parsing.
class UsageError : public Error {
public:
    using Error::Error;
};

struct Context {
    RunConfig cfg;
    fs::path scenarioDir;
    std::string nodes = "all";
    std::string times = "all";
    std::string sense = "both";
    std::string lambdas;
    int t = 0;
    // generate
    std::string preset;
    FeederSpec spec;
    std::string phases;
    int horizon = 0;
    int beta = 0;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

// ---- argument helpers ----

void requireSeed(const Context& c) {
    if (!c.cfg.seed) throw UsageError(c.cfg.subcommand + ": --seed is required");
}

fs::path requireOut(const Context& c) {
    if (c.cfg.out.empty()) throw UsageError(c.cfg.subcommand + ": --out is required");
    fs::create_directories(c.cfg.out);
    return c.cfg.out;
}

void applyScenarioDir(Context& c) {
    if (c.scenarioDir.empty()) return;
    auto fill = [&](fs::path& p, const char* name) {
        if (p.empty()) p = c.scenarioDir / name;
    };
    fill(c.cfg.network, "network.json");
    fill(c.cfg.loads, "loads.csv");
    fill(c.cfg.evs, "evs.csv");
    fill(c.cfg.tazs, "tazs.csv");
    if (c.cfg.config.empty() && fs::exists(c.scenarioDir / "config.json")) c.cfg.config = c.scenarioDir / "config.json";
}

void requirePath(const fs::path& p, const char* flag) {
    if (p.empty()) throw UsageError(std::string("missing ") + flag + " (or --scenario DIR)");
}

ScenarioData loadInputs(const RunConfig& cfg) {
    requirePath(cfg.network, "--network");
    requirePath(cfg.loads, "--loads");
    requirePath(cfg.evs, "--evs");
    requirePath(cfg.tazs, "--tazs");
    return loadScenario(ScenarioPaths{cfg.network, cfg.loads, cfg.evs, cfg.tazs, cfg.config});
}

Provenance provenanceFor(const RunConfig& cfg) {
    Provenance p;
    p.seed = cfg.seed;
    auto add = [&](const char* label, const fs::path& path) {
        if (!path.empty()) p.inputs.emplace_back(label, sha256File(path));
    };
    add("network", cfg.network);
    add("loads", cfg.loads);
    add("evs", cfg.evs);
    add("tazs", cfg.tazs);
    add("config", cfg.config);
    return p;
}

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) items.push_back(cur.substr(b, e - b + 1));
    }
    return items;
}

// "all" or a comma list of node names ("bus.phase") and bus names (every phase of the bus).
std::vector<std::size_t> parseNodeList(const NetworkModel& net, const std::string& spec) {
    std::set<std::size_t> chosen;
    if (spec == "all") {
        for (std::size_t i = 0; i < net.nodes().size(); ++i) chosen.insert(i);
    } else {
        for (const std::string& item : splitList(spec)) {
            if (item.find('.') != std::string::npos) {
                const auto idx = net.nodeIndex(NodeId::parse(item));
                if (!idx) throw UsageError("--nodes: unknown node '" + item + "'");
                chosen.insert(*idx);
                continue;
            }
            const auto bus = net.busIndex(item);
            if (!bus) throw UsageError("--nodes: unknown bus '" + item + "'");
            for (Phase ph : net.bus(*bus).phases.list()) chosen.insert(static_cast<std::size_t>(net.nodeIndex(*bus, ph)));
        }
    }
    if (chosen.empty()) throw UsageError("--nodes selects no node");
    return {chosen.begin(), chosen.end()};
}

// "all" or a comma list of steps and inclusive ranges "a-b".
std::vector<int> parseTimeList(int horizon, const std::string& spec) {
    std::set<int> chosen;
    if (spec == "all") {
        for (int t = 1; t <= horizon; ++t) chosen.insert(t);
    } else {
        for (const std::string& item : splitList(spec)) {
            const auto dash = item.find('-', 1);
            const int lo = static_cast<int>(parseInt(item.substr(0, dash), "--times"));
            const int hi = dash == std::string::npos ? lo : static_cast<int>(parseInt(item.substr(dash + 1), "--times"));
            if (lo < 1 || hi > horizon || lo > hi) {
                throw UsageError("--times: '" + item + "' is outside 1.." + std::to_string(horizon));
            }
            for (int t = lo; t <= hi; ++t) chosen.insert(t);
        }
    }
    if (chosen.empty()) throw UsageError("--times selects no time step");
    return {chosen.begin(), chosen.end()};
}

std::vector<Sense> parseSenses(const std::string& s) {
    if (s == "both") return {Sense::over, Sense::under};
    return {parseSense(s)};
}

CongenConfig congenConfig(const Context& c, const ScenarioData& scenario, const fs::path& workDir) {
    CongenConfig cc;
    cc.sampleCount = c.cfg.sampleCount;
    cc.seed = c.cfg.seed.value_or(0);
    cc.maxIterations = c.cfg.maxIterations;
    cc.lambdaMax = c.cfg.lambdaMax.value_or(scenario.config().lambdaMax);
    cc.naive = c.cfg.naive;
    cc.jobs = c.cfg.jobs;
    if (c.cfg.externalSolver) {
        const char* tmpl = std::getenv(kSolverEnv);
        if (tmpl == nullptr || *tmpl == '\0') {
            throw UsageError(std::string("--external-solver needs the ") + kSolverEnv +
                             " environment variable (a command with {mps} and {sol} placeholders)");
        }
        cc.externalSolver = tmpl;
        cc.workDir = (workDir / "solver").string();
    }
    return cc;
}

int exitCodeFor(CongenStatus s) {
    switch (s) {
        case CongenStatus::converged: return kExitOk;
        case CongenStatus::infeasible: return kExitInfeasible;
        case CongenStatus::iterationLimit: return kExitIterationLimit;
    }
    return kExitError;
}

// Larger is worse: error, infeasible, iteration limit, ok.
int severity(int code) {
    switch (code) {
        case kExitOk: return 0;
        case kExitIterationLimit: return 1;
        case kExitInfeasible: return 2;
        default: return 3;
    }
}

std::string runSummaryJson(const ScenarioData& scenario, const CongenResult& r, double lambdaMax, const Provenance& prov) {
    Json j;
    j["provenance"] = Json::parse(prov.json());
    j["status"] = toString(r.status);
    j["lambda_max"] = lambdaMax;
    if (r.schedule) {
        j["gamma_max"] = r.schedule->gammaMax;
        j["charge_time_steps"] = chargeTimeSteps(scenario, r);
        j["predicted_slack_total"] = r.schedule->predictedSlackTotal();
        j["violation_total"] = r.simulation.report.total();
        j["violation_count"] = r.simulation.report.count();
    } else {
        j["gamma_max"] = nullptr;
        j["charge_time_steps"] = nullptr;
    }
    j["iterations"] = r.trace.size();
    j["active_constraints"] = r.active.size();
    j["samples"] = r.samples.size();
    j["diagnostics"] = r.diagnostics;
    return j.dump(2) + "\n";
}

void writeRunArtifacts(const fs::path& dir, const ScenarioData& scenario, const CongenResult& r, double lambdaMax,
                       const Provenance& prov, bool timings) {
    fs::create_directories(dir);
    if (r.schedule) {
        writeTextFile(dir / "schedule.csv", scheduleToCsv(*r.schedule, scenario, prov));
        writeTextFile(dir / "evs_schedule.csv", evScheduleToCsv(*r.schedule, scenario, prov));
        writeTextFile(dir / "gantt.json", ganttToJson(*r.schedule, scenario, prov));
        writeTextFile(dir / "violations.csv", violationsToCsv(scenario, r.simulation.report, prov));
    }
    writeTextFile(dir / "trace.csv", traceToCsv(r, prov, timings));
    writeTextFile(dir / "cla.json", claModelToJson(r.cla, scenario, prov.json()));
    writeTextFile(dir / "summary.json", runSummaryJson(scenario, r, lambdaMax, prov));
}

std::string lambdaDirName(double lambda) { return "lambda_" + formatExact(lambda); }

// ---- subcommands ----

int cmdNetcheck(Context& c) {
    std::ostream& out = *c.out;
    requirePath(c.cfg.network, "--network");
    if (c.cfg.loads.empty() || c.cfg.evs.empty() || c.cfg.tazs.empty()) {
        const NetworkModel net = parseNetwork(c.cfg.network);
        out << "network: buses=" << net.buses().size() << " lines=" << net.lines().size() << " nodes=" << net.nodes().size()
            << " source=" << net.sourceBus() << " base_kv=" << formatNumber(net.baseKv()) << " base_kva="
            << formatNumber(net.baseKva()) << "\n";
        return kExitOk;
    }
    const ScenarioData s = loadInputs(c.cfg);
    const NetworkModel& net = s.network();
    out << "network: buses=" << net.buses().size() << " lines=" << net.lines().size() << " nodes=" << net.nodes().size()
        << " source=" << net.sourceBus() << " base_kv=" << formatNumber(net.baseKv()) << " base_kva="
        << formatNumber(net.baseKva()) << "\n";
    out << "scenario: horizon=" << s.horizon() << " beta=" << s.beta() << " evs=" << s.evs().size()
        << " tazs=" << s.tazs().size() << " ev_buses=" << s.evBuses().size() << " rate_kw=" << formatNumber(s.config().rateKw)
        << " lambda_max=" << formatNumber(s.config().lambdaMax) << "\n";
    bool ok = true;
    for (std::size_t k = 0; k < s.tazs().size(); ++k) {
        const int w = s.tazWindow(k);
        const int latest = s.tazs()[k].departure - w;
        out << "taz " << s.tazs()[k].id << ": evs=" << s.tazEvs(k).size() << " window=" << w
            << " departure=" << s.tazs()[k].departure << " latest_start=";
        if (w == 0) {
            out << "none\n";
        } else if (latest < 1) {
            out << "infeasible\n";
            ok = false;
        } else {
            out << latest << "\n";
        }
    }
    const auto steps = static_cast<std::size_t>(s.horizon());
    ChargeSchedule idle;
    idle.horizon = s.horizon();
    idle.tazCharging.assign(s.tazs().size(), std::vector<std::uint8_t>(steps, 0));
    idle.evCharging.assign(s.evs().size(), std::vector<std::uint8_t>(steps, 0));
    deriveScheduleState(idle, s);
    const PowerFlowResponse grid(s);
    const SimulationResult sim = simulateSchedule(grid, idle, c.cfg.jobs);
    out << "background: violations=" << sim.report.count() << " total=" << formatNumber(sim.report.total()) << "\n";
    if (!ok) *c.err << "netcheck: some TAZ cannot finish charging before its departure\n";
    return kExitOk;
}

int cmdPf(Context& c) {
    requirePath(c.cfg.network, "--network");
    requirePath(c.cfg.loads, "--loads");
    const NetworkModel net = parseNetwork(c.cfg.network);
    const ScenarioConfig sc = parseConfig(c.cfg.config);
    if (c.t < 1 || c.t > sc.horizon) {
        throw UsageError("pf: --t must lie in 1.." + std::to_string(sc.horizon));
    }
    const auto background = parseLoads(net, c.cfg.loads, sc.horizon);
    InjectionSnapshot snap{c.t, {}};
    for (const Complex& kw : background[static_cast<std::size_t>(c.t - 1)]) snap.demandPu.push_back(kw / net.baseKva());
    const VoltageSolution sol = solvePf(net, snap);
    if (!sol.converged) {
        throw PowerFlowError("power flow did not converge at t=" + std::to_string(c.t), c.t, sol.mismatch);
    }
    Provenance prov = provenanceFor(c.cfg);
    prov.extra.emplace_back("t", std::to_string(c.t));
    std::ostream& out = *c.out;
    out << prov.csvHeader() << "node,mag_pu,angle_deg,v_pu2\n";
    for (std::size_t i = 0; i < net.nodes().size(); ++i) {
        const double angle = std::arg(sol.phasor[i]) * 180.0 / std::numbers::pi;
        out << net.nodes()[i].str() << ',' << formatExact(std::abs(sol.phasor[i])) << ',' << formatExact(angle) << ','
            << formatExact(sol.v2[i]) << '\n';
    }
    return kExitOk;
}

SampleSet sampleWithTargets(const Context& c, const ScenarioData& s, const GridResponse& grid,
                            const std::vector<std::size_t>& nodes, const std::vector<int>& times) {
    const std::size_t m = c.cfg.sampleCount == 0 ? defaultSampleCount(s) : c.cfg.sampleCount;
    SampleSet samples = drawSamples(s, m, *c.cfg.seed);
    if (!nodes.empty()) computeTargets(grid, samples, nodes, times, c.cfg.jobs);
    return samples;
}

int cmdSample(Context& c) {
    requireSeed(c);
    const fs::path dir = requireOut(c);
    const ScenarioData s = loadInputs(c.cfg);
    const PowerFlowResponse grid(s);
    const bool withTargets = c.nodes != "all" || c.times != "all";
    std::vector<std::size_t> nodes;
    std::vector<int> times;
    if (withTargets) {
        nodes = parseNodeList(s.network(), c.nodes);
        times = parseTimeList(s.horizon(), c.times);
    }
    const SampleSet samples = sampleWithTargets(c, s, grid, nodes, times);
    Provenance prov = provenanceFor(c.cfg);
    prov.extra.emplace_back("samples", std::to_string(samples.size()));

    std::string text = prov.csvHeader() + "sample,ev,charging\n";
    for (std::size_t m = 0; m < samples.size(); ++m) {
        for (std::size_t e = 0; e < s.evs().size(); ++e) {
            text += std::to_string(m + 1) + "," + s.evs()[e].id + "," + std::to_string(samples.evOn[m][e]) + "\n";
        }
    }
    writeTextFile(dir / "samples.csv", text);
    if (withTargets) {
        std::string tt = prov.csvHeader() + "sample,node,t,v_pu2\n";
        for (const auto& [key, values] : samples.targets) {
            for (std::size_t m = 0; m < values.size(); ++m) {
                tt += std::to_string(m + 1) + "," + s.network().nodes()[key.first].str() + "," + std::to_string(key.second) +
                      "," + formatExact(values[m]) + "\n";
            }
        }
        writeTextFile(dir / "targets.csv", tt);
    }
    return kExitOk;
}

int cmdFit(Context& c) {
    requireSeed(c);
    const fs::path dir = requireOut(c);
    const ScenarioData s = loadInputs(c.cfg);
    const PowerFlowResponse grid(s);
    const auto nodes = parseNodeList(s.network(), c.nodes);
    const auto times = parseTimeList(s.horizon(), c.times);
    const auto senses = parseSenses(c.sense);
    const SampleSet samples = sampleWithTargets(c, s, grid, nodes, times);

    ClaModel model;
    model.seed = *c.cfg.seed;
    model.sampleCount = samples.size();
    model.scenarioHash = scenarioHash(s);
    for (int t : times) {
        for (std::size_t node : nodes) {
            for (Sense sense : senses) model.insert(fitCla(samples, node, t, sense));
        }
    }
    writeTextFile(dir / "cla.json", claModelToJson(model, s, provenanceFor(c.cfg).json()));
    *c.err << "fit: " << model.size() << " functions on " << samples.size() << " samples\n";
    return kExitOk;
}

int cmdSolve(Context& c) {
    if (!c.cfg.naive) requireSeed(c);
    const fs::path dir = requireOut(c);
    const ScenarioData s = loadInputs(c.cfg);
    const PowerFlowResponse grid(s);
    const CongenConfig cc = congenConfig(c, s, dir);
    Provenance prov = provenanceFor(c.cfg);
    prov.extra.emplace_back("lambda_max", formatExact(cc.lambdaMax));
    if (cc.naive) prov.extra.emplace_back("mode", "naive");

    const CongenResult r = runCongen(grid, cc);
    writeRunArtifacts(dir, s, r, cc.lambdaMax, prov, c.cfg.timings);
    *c.err << "solve: " << toString(r.status) << " after " << r.trace.size() << " iteration(s)";
    if (r.schedule) *c.err << ", gamma_max=" << r.schedule->gammaMax << ", violation=" << formatNumber(r.simulation.report.total());
    *c.err << "\n";
    if (!r.diagnostics.empty()) *c.err << "solve: " << r.diagnostics << "\n";
    return exitCodeFor(r.status);
}

std::vector<double> parseLambdas(const Context& c) {
    std::vector<double> values;
    for (const std::string& item : splitList(c.lambdas)) {
        const double v = parseDouble(item, "--lambdas");
        if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError("--lambdas: '" + item + "' is not a finite non-negative number");
        values.push_back(v);
    }
    if (values.empty()) throw UsageError("sweep: --lambdas needs at least one value");
    std::sort(values.begin(), values.end());
    const auto dup = std::unique(values.begin(), values.end());
    if (dup != values.end()) {
        *c.err << "sweep: warning: dropped " << (values.end() - dup) << " repeated lambda value(s)\n";
        values.erase(dup, values.end());
    }
    return values;
}

int cmdSweep(Context& c) {
    if (!c.cfg.naive) requireSeed(c);
    const std::vector<double> lambdas = parseLambdas(c);
    const fs::path dir = requireOut(c);
    const ScenarioData s = loadInputs(c.cfg);
    const PowerFlowResponse grid(s);
    const CongenConfig cc = congenConfig(c, s, dir);
    const Provenance prov = provenanceFor(c.cfg);

    const std::vector<SweepPoint> points = sweep(grid, lambdas, cc);
    int worst = kExitOk;
    for (const SweepPoint& pt : points) {
        Provenance p = prov;
        p.extra.emplace_back("lambda_max", formatExact(pt.lambda));
        const fs::path sub = dir / lambdaDirName(pt.lambda);
        int code = kExitOk;
        if (!pt.error.empty()) {
            fs::create_directories(sub);
            Json j;
            j["provenance"] = Json::parse(p.json());
            j["status"] = "error";
            j["lambda_max"] = pt.lambda;
            j["error"] = pt.error;
            writeTextFile(sub / "summary.json", j.dump(2) + "\n");
            *c.err << "sweep: lambda=" << formatExact(pt.lambda) << ": " << pt.error << "\n";
            code = kExitError;
        } else {
            writeRunArtifacts(sub, s, pt.result, pt.lambda, p, c.cfg.timings);
            code = exitCodeFor(pt.result.status);
            *c.err << "sweep: lambda=" << formatExact(pt.lambda) << ": " << toString(pt.result.status);
            if (pt.result.schedule) *c.err << ", gamma_max=" << pt.result.schedule->gammaMax;
            *c.err << "\n";
        }
        if (severity(code) > severity(worst)) worst = code;
    }
    writeTextFile(dir / "sweep.csv", sweepToCsv(s, points, prov));
    return worst;
}

int cmdOracle(Context& c) {
    const fs::path dir = requireOut(c);
    const ScenarioData s = loadInputs(c.cfg);
    const PowerFlowResponse grid(s);
    const double lambda = c.cfg.lambdaMax.value_or(s.config().lambdaMax);
    const OracleResult r = bruteForceOracle(grid, lambda, 1000000, c.cfg.jobs);
    Provenance prov = provenanceFor(c.cfg);
    prov.extra.emplace_back("lambda_max", formatExact(lambda));

    Json j;
    j["provenance"] = Json::parse(prov.json());
    j["lambda_max"] = lambda;
    j["feasible"] = r.feasible;
    j["evaluated"] = r.evaluated;
    if (r.feasible) {
        j["gamma_max"] = r.gamma;
        j["charge_time_steps"] = s.horizon() - r.gamma;
        j["violation_total"] = r.violation;
        Json starts = Json::object();
        for (std::size_t k = 0; k < s.tazs().size(); ++k) {
            if (r.starts[k] > 0) starts[s.tazs()[k].id] = r.starts[k];
        }
        j["starts"] = starts;
    }
    writeTextFile(dir / "oracle.json", j.dump(2) + "\n");
    *c.err << "oracle: " << r.evaluated << " start tuples, " << (r.feasible ? "gamma_max=" + std::to_string(r.gamma) : "infeasible")
           << "\n";
    return r.feasible ? kExitOk : kExitInfeasible;
}

// ---- report ----

Json ganttSeries(const fs::path& path) {
    const Json g = Json::parse(readTextFile(path));
    Json out;
    out["gamma_max"] = g.at("gamma_max");
    out["horizon"] = g.at("horizon");
    out["bars"] = g.at("bars");
    std::vector<std::pair<int, int>> bars;
    for (const Json& b : g.at("bars")) bars.emplace_back(b.at("start_t").get<int>(), b.at("end_t").get<int>());
    Json gaps = Json::array();
    if (!bars.empty()) {
        int first = bars[0].first;
        int last = bars[0].second;
        for (const auto& [a, b] : bars) {
            first = std::min(first, a);
            last = std::max(last, b);
        }
        int gapStart = 0;
        for (int t = first; t <= last + 1; ++t) {
            const bool busy = t <= last && std::any_of(bars.begin(), bars.end(), [t](const auto& w) {
                return w.first <= t && t <= w.second;
            });
            if (!busy && gapStart == 0 && t <= last) gapStart = t;
            if (busy && gapStart != 0) {
                gaps.push_back({{"start_t", gapStart}, {"end_t", t - 1}, {"steps", t - gapStart}});
                gapStart = 0;
            }
        }
    }
    out["idle_gaps"] = gaps;
    return out;
}

Json numberOrNull(const std::string& field, const std::string& where) {
    if (field.empty()) return nullptr;
    return parseDouble(field, where);
}

Json integerOrNull(const std::string& field, const std::string& where) {
    if (field.empty()) return nullptr;
    return parseInt(field, where);
}

Json traceSeries(const fs::path& path) {
    const CsvTable t = readCsv(path, {"iter", "gamma", "pred_slack", "actual_viol", "n_constraints", "wall_s"});
    Json rows = Json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string where = path.string() + ":" + std::to_string(t.lineNumbers[r]);
        const auto& f = t.rows[r];
        rows.push_back({{"iter", parseInt(f[0], where)},
                        {"gamma", f[1].empty() ? Json(nullptr) : Json(parseInt(f[1], where))},
                        {"pred_slack", parseDouble(f[2], where)},
                        {"actual_viol", parseDouble(f[3], where)},
                        {"n_constraints", parseInt(f[4], where)}});
    }
    return rows;
}

int cmdReport(Context& c) {
    if (c.cfg.out.empty()) throw UsageError("report: --out must name a directory with solve or sweep artifacts");
    const fs::path dir = c.cfg.out;
    const fs::path gantt = dir / "gantt.json";
    const fs::path trace = dir / "trace.csv";
    const fs::path sweepCsv = dir / "sweep.csv";
    const bool hasSolve = fs::exists(gantt) && fs::exists(trace);
    const bool hasSweep = fs::exists(sweepCsv);
    if (!hasSolve && !hasSweep) {
        throw InputError("report: no artifacts in " + dir.string() + " (expected gantt.json and trace.csv, or sweep.csv)");
    }

    Provenance prov;
    Json j;
    if (hasSolve) {
        prov.inputs.emplace_back("gantt", sha256File(gantt));
        prov.inputs.emplace_back("trace", sha256File(trace));
        j["gantt"] = ganttSeries(gantt);
        j["iterations"] = traceSeries(trace);
    }
    if (hasSweep) {
        prov.inputs.emplace_back("sweep", sha256File(sweepCsv));
        const CsvTable t = readCsv(sweepCsv, {"lambda", "charge_time_steps", "viol_total", "viol_count", "iters"});
        Json tradeoff = Json::array();
        Json runs = Json::array();
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const std::string where = sweepCsv.string() + ":" + std::to_string(t.lineNumbers[r]);
            const auto& f = t.rows[r];
            const double lambda = parseDouble(f[0], where);
            tradeoff.push_back({{"lambda", lambda},
                                {"charge_time_steps", integerOrNull(f[1], where)},
                                {"viol_total", numberOrNull(f[2], where)},
                                {"viol_count", integerOrNull(f[3], where)},
                                {"iters", parseInt(f[4], where)}});
            const fs::path sub = dir / ("lambda_" + f[0]);
            Json run;
            run["lambda"] = lambda;
            if (fs::exists(sub / "gantt.json")) run["gantt"] = ganttSeries(sub / "gantt.json");
            if (fs::exists(sub / "trace.csv")) run["iterations"] = traceSeries(sub / "trace.csv");
            runs.push_back(run);
        }
        j["tradeoff"] = tradeoff;
        j["runs"] = runs;
    }
    Json doc;
    doc["provenance"] = Json::parse(prov.json());
    for (auto& [k, v] : j.items()) doc[k] = v;
    writeTextFile(dir / "report.json", doc.dump(2) + "\n");
    return kExitOk;
}

// ---- generate ----

FeederSpec presetSpec(const std::string& name) {
    FeederSpec f;
    if (name == "tiny") {
        f.buses = 5;
        f.phases = PhasePattern::single;
        f.tazs = 2;
        f.evsPerTaz = 2;
        f.config.horizon = 12;
        f.config.beta = 4;
        f.startHour = 15.0;
        f.baseKva = 200.0;
        f.loadFactor = 0.95;
        f.evsAtFarEnd = true;
    } else if (name == "weak") {
        f.buses = 6;
        f.phases = PhasePattern::single;
        f.tazs = 2;
        f.evsPerTaz = 2;
        f.config.horizon = 16;
        f.config.beta = 4;
        f.startHour = 14.0;
        f.baseKva = 200.0;
        f.loadFactor = 0.95;
        f.evsAtFarEnd = true;
    } else if (!name.empty()) {
        throw UsageError("generate: unknown preset '" + name + "' (expected tiny or weak)");
    }
    return f;
}

int cmdGenerate(Context& c, const CLI::App& sub) {
    requireSeed(c);
    const fs::path dir = requireOut(c);
    FeederSpec f = presetSpec(c.preset);
    auto given = [&](const char* flag) { return sub.count(flag) > 0; };
    if (given("--buses")) f.buses = c.spec.buses;
    if (given("--tazs-count")) f.tazs = c.spec.tazs;
    if (given("--evs-per-taz")) f.evsPerTaz = c.spec.evsPerTaz;
    if (given("--phases")) f.phases = parsePhasePattern(c.phases);
    if (given("--horizon")) f.config.horizon = c.horizon;
    if (given("--beta")) f.config.beta = c.beta;
    if (given("--start-hour")) f.startHour = c.spec.startHour;
    if (given("--base-kva")) f.baseKva = c.spec.baseKva;
    if (given("--impedance-scale")) f.impedanceScale = c.spec.impedanceScale;
    if (given("--load-factor")) f.loadFactor = c.spec.loadFactor;
    if (given("--far-end")) f.evsAtFarEnd = true;
    if (c.cfg.lambdaMax) f.config.lambdaMax = *c.cfg.lambdaMax;
    f.seed = *c.cfg.seed;

    const ScenarioData s = generateSyntheticFeeder(f);
    Provenance prov;
    prov.seed = f.seed;
    prov.extra.emplace_back("generator", std::string("synthetic ") + (c.preset.empty() ? "custom" : c.preset));
    writeScenario(s, dir, &prov);
    *c.err << "generate: " << s.network().buses().size() << " buses, " << s.evs().size() << " EVs, " << s.tazs().size()
           << " TAZs, T=" << s.horizon() << " -> " << dir.string() << "\n";
    return kExitOk;
}

void addScenarioOptions(CLI::App* sub, Context& c, bool full) {
    sub->add_option("--scenario", c.scenarioDir, "Directory holding network.json, loads.csv, evs.csv, tazs.csv, config.json");
    sub->add_option("--network", c.cfg.network, "Network JSON file");
    sub->add_option("--loads", c.cfg.loads, "Background load CSV");
    sub->add_option("--config", c.cfg.config, "Scenario config JSON");
    if (full) {
        sub->add_option("--evs", c.cfg.evs, "EV CSV");
        sub->add_option("--tazs", c.cfg.tazs, "TAZ CSV");
    }
}

void addRunOptions(CLI::App* sub, Context& c) {
    sub->add_option("--seed", c.cfg.seed, "Seed for sample generation (required)");
    sub->add_option("--M", c.cfg.sampleCount, "Initial sample count (default max(2|K|+10, 30))");
    sub->add_option("--max-iters", c.cfg.maxIterations, "Constraint-generation iteration cap")->check(CLI::PositiveNumber);
    sub->add_flag("--naive", c.cfg.naive, "Solve without grid constraints and stop");
    sub->add_flag("--external-solver", c.cfg.externalSolver,
                  std::string("Solve MILPs with the command in $") + kSolverEnv);
    sub->add_flag("--timings", c.cfg.timings, "Record wall-clock seconds in trace.csv");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context c;
    c.out = &out;
    c.err = &err;

    CLI::App app{"Evacuation EV charging scheduler with grid-aware constraint generation", "evacharge"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.add_option("--jobs", c.cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* netcheck = app.add_subcommand("netcheck", "Validate inputs and print a summary");
    addScenarioOptions(netcheck, c, true);

    auto* pf = app.add_subcommand("pf", "Background power flow at one time step");
    addScenarioOptions(pf, c, false);
    pf->add_option("--t", c.t, "Time step (1-based)")->required();

    auto* sample = app.add_subcommand("sample", "Draw EV charging samples and squared-voltage targets");
    auto* fit = app.add_subcommand("fit", "Fit conservative linear approximations");
    for (CLI::App* sub : {sample, fit}) {
        addScenarioOptions(sub, c, true);
        sub->add_option("--out", c.cfg.out, "Output directory");
        sub->add_option("--seed", c.cfg.seed, "Sampling seed (required)");
        sub->add_option("--M", c.cfg.sampleCount, "Sample count (default max(2|K|+10, 30))");
        sub->add_option("--nodes", c.nodes, "'all' or a list of nodes (bus.phase) and buses");
        sub->add_option("--times", c.times, "'all' or a list of steps and ranges such as 1-4,9");
    }
    fit->add_option("--sense", c.sense, "over, under or both")->check(CLI::IsMember({"over", "under", "both"}));

    auto* solve = app.add_subcommand("solve", "Run constraint generation for one violation budget");
    addScenarioOptions(solve, c, true);
    addRunOptions(solve, c);
    solve->add_option("--out", c.cfg.out, "Output directory");
    solve->add_option("--lambda-max", c.cfg.lambdaMax, "Violation budget (overrides config)");

    auto* sweepCmd = app.add_subcommand("sweep", "Run constraint generation for several violation budgets");
    addScenarioOptions(sweepCmd, c, true);
    addRunOptions(sweepCmd, c);
    sweepCmd->add_option("--out", c.cfg.out, "Output directory");
    sweepCmd->add_option("--lambdas", c.lambdas, "Comma-separated violation budgets")->required();

    auto* oracle = app.add_subcommand("oracle", "Exhaustive search over TAZ start times (small instances)");
    addScenarioOptions(oracle, c, true);
    oracle->add_option("--out", c.cfg.out, "Output directory");
    oracle->add_option("--lambda-max", c.cfg.lambdaMax, "Violation budget (overrides config)");

    auto* report = app.add_subcommand("report", "Collect plot-ready series from solve or sweep artifacts");
    report->add_option("--out", c.cfg.out, "Directory with the artifacts; report.json is written here");

    auto* generate = app.add_subcommand("generate", "Write a synthetic scenario");
    generate->add_option("--out", c.cfg.out, "Output directory");
    generate->add_option("--seed", c.cfg.seed, "Generator seed (required)");
    generate->add_option("--preset", c.preset, "tiny or weak")->check(CLI::IsMember({"tiny", "weak"}));
    generate->add_option("--buses", c.spec.buses, "Bus count including the source");
    generate->add_option("--tazs-count", c.spec.tazs, "TAZ count");
    generate->add_option("--evs-per-taz", c.spec.evsPerTaz, "EVs per TAZ");
    generate->add_option("--phases", c.phases, "single, three or mixed");
    generate->add_option("--horizon", c.horizon, "Time steps T");
    generate->add_option("--beta", c.beta, "Steps for a full charge");
    generate->add_option("--start-hour", c.spec.startHour, "Clock hour of t=1");
    generate->add_option("--base-kva", c.spec.baseKva, "Per-phase power base");
    generate->add_option("--impedance-scale", c.spec.impedanceScale, "Line impedance multiplier");
    generate->add_option("--load-factor", c.spec.loadFactor, "Background level relative to the violation threshold");
    generate->add_option("--lambda-max", c.cfg.lambdaMax, "Violation budget stored in config.json");
    generate->add_flag("--far-end", "Place EVs on the deepest buses");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    c.cfg.subcommand = chosen->get_name();
    try {
        applyScenarioDir(c);
        if (chosen == netcheck) return cmdNetcheck(c);
        if (chosen == pf) return cmdPf(c);
        if (chosen == sample) return cmdSample(c);
        if (chosen == fit) return cmdFit(c);
        if (chosen == solve) return cmdSolve(c);
        if (chosen == sweepCmd) return cmdSweep(c);
        if (chosen == oracle) return cmdOracle(c);
        if (chosen == report) return cmdReport(c);
        if (chosen == generate) return cmdGenerate(c, *generate);
    } catch (const std::exception& e) {
        err << "evacharge " << c.cfg.subcommand << ": error: " << e.what() << "\n";
        return kExitError;
    }
    err << "evacharge: unknown subcommand\n";
    return kExitError;
}

}  // namespace evac::cli
