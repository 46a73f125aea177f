#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "evac/cla.hpp"
#include "evac/eevc.hpp"
#include "evac/errors.hpp"
#include "evac/oracle.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace evac;
using evac::testing::loadFixture;
using evac::testing::naiveGamma;

namespace {

// Exact affine surrogates: base `early` up to `cutoff`, `late` after, one p.u. sag per p.u. demand.
ClaModel cutoffModel(const ScenarioData& s, const std::vector<ClaKey>& keys, int cutoff, double early, double late) {
    ClaModel m;
    for (const ClaKey& key : keys) {
        ClaFunction f;
        f.node = key.node;
        f.t = key.t;
        f.sense = key.sense;
        f.a0 = key.t <= cutoff ? early : late;
        f.a1.assign(s.evBuses().size(), -1.0);
        m.insert(f);
    }
    return m;
}

std::vector<ClaKey> underKeys(const ScenarioData& s) {
    std::vector<ClaKey> keys;
    for (int t = 1; t <= s.horizon(); ++t) {
        for (std::size_t i = 0; i < s.network().nodes().size(); ++i) keys.push_back({i, t, Sense::under});
    }
    return keys;
}

}  // namespace

TEST_CASE("program size follows the closed-form counts") {
    const EevcCounts c = eevcCounts(4, 2, 16, 3, true);
    CHECK(c.variables == 1 + 16 + 32 + 128 + 3);
    CHECK(c.binaries == 16 + 32 + 64);
    CHECK(c.constraints == 32 + 64 + 64 + 128 + 2 + 3 + 1);
    CHECK(eevcCounts(4, 2, 16, 0, true).constraints == 32 + 64 + 64 + 128 + 2);
    CHECK(eevcCounts(4, 2, 16, 3, false).constraints == 32 + 64 + 64 + 128 + 2 + 3);

    for (const auto& name : testing::fixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        std::vector<ClaKey> active = {{1, 2, Sense::under}, {1, 3, Sense::over}, {2, s.horizon(), Sense::under}};
        const ClaModel cla = cutoffModel(s, active, s.horizon(), 1.0, 1.0);
        for (const double lambda : {0.0, mp::kInf}) {
            const EevcInstance inst{&s, active, lambda, true};
            const EevcProgram ep = buildProgram(inst, cla);
            const EevcCounts expect = eevcCounts(s.evs().size(), s.tazs().size(), s.horizon(), active.size(), std::isfinite(lambda));
            CHECK(ep.program.variables().size() == expect.variables);
            CHECK(ep.program.constraints().size() == expect.constraints);
            const auto bins = std::count_if(ep.program.variables().begin(), ep.program.variables().end(),
                                            [](const mp::Variable& v) { return v.kind == mp::VarKind::binary; });
            CHECK(static_cast<std::size_t>(bins) == expect.binaries);
        }
        const EevcProgram naive = buildProgram(EevcInstance{&s, {}, 0.0, false}, ClaModel{});
        CHECK(naive.program.variables().size() == eevcCounts(s.evs().size(), s.tazs().size(), s.horizon(), 0, true).variables);
    }
}

TEST_CASE("program rows and columns carry readable names") {
    const ScenarioData s = loadFixture("tiny/seed_1");
    const std::vector<ClaKey> active = {{2, 5, Sense::under}};
    const EevcProgram ep = buildProgram(EevcInstance{&s, active, 0.1, true}, cutoffModel(s, active, 99, 1.0, 1.0));
    const auto& p = ep.program;
    const std::string ev = s.evs()[0].id;
    const std::string taz = s.tazs()[0].id;
    const std::string node = s.network().nodes()[2].str();
    for (const std::string& v : std::vector<std::string>{"gamma", "tau_1", "c_" + taz + "_3", "ch_" + ev + "_4", "L_" + ev + "_5", "lm_" + node + "_5"}) {
        CHECK_MESSAGE(p.findVariable(v).has_value(), v);
    }
    for (const std::string& r : std::vector<std::string>{"start_1", "begun_2", "soc_" + ev + "_2", "keep_" + taz + "_1", "stop_" + taz + "_1",
                                "follow_" + ev + "_1", "only_" + ev + "_1", "depart_" + taz, "vmin_" + node + "_5", "budget"}) {
        CHECK_MESSAGE(p.findConstraint(r).has_value(), r);
    }
    CHECK(p.sense() == mp::ObjSense::maximize);
}

TEST_CASE("program construction checks its inputs") {
    const ScenarioData s = loadFixture("tiny/seed_1");
    const std::vector<ClaKey> active = {{2, 5, Sense::under}};
    CHECK_THROWS_AS(buildProgram(EevcInstance{&s, {}, 0.0, true}, ClaModel{}), InputError);
    CHECK_THROWS_AS(buildProgram(EevcInstance{&s, active, 0.0, false}, ClaModel{}), InputError);
    CHECK_THROWS_AS(buildProgram(EevcInstance{&s, active, 0.0, true}, ClaModel{}), InputError);
}

TEST_CASE("the naive program charges every TAZ as late as its departure allows") {
    for (const auto& name : testing::fixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        const EevcInstance inst{&s, {}, 0.0, false};
        const EevcProgram ep = buildProgram(inst, ClaModel{});
        const mp::Solution sol = mp::solveMilp(ep.program, eevcMilpOptions(ep));
        REQUIRE(std::string(mp::toString(sol.status)) == "optimal");
        CHECK(sol.objective == doctest::Approx(naiveGamma(s)));
        const ChargeSchedule sched = decode(ep, sol, inst);
        CHECK(sched.gammaMax == naiveGamma(s));
        CHECK(testing::scheduleInvariantBreach(s, sched) == "");
    }
}

TEST_CASE("exact surrogates reproduce the brute-force optimum") {
    for (const auto& name : testing::tinyFixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        const int cutoff = s.horizon() / 2 + 1;
        const auto keys = underKeys(s);
        const ClaModel cla = cutoffModel(s, keys, cutoff, 1.06, 0.91);
        const EevcInstance inst{&s, keys, 0.0, true};
        const EevcProgram ep = buildProgram(inst, cla);
        const mp::Solution sol = mp::solveMilp(ep.program, eevcMilpOptions(ep));
        REQUIRE(std::string(mp::toString(sol.status)) == "optimal");
        const ChargeSchedule sched = decode(ep, sol, inst);
        CHECK(testing::scheduleInvariantBreach(s, sched) == "");

        std::vector<std::vector<double>> base;
        for (int t = 1; t <= s.horizon(); ++t) base.emplace_back(s.network().nodes().size(), t <= cutoff ? 1.06 : 0.91);
        const AffineResponse grid(s, base,
                                  std::vector<std::vector<double>>(s.network().nodes().size(),
                                                                   std::vector<double>(s.evBuses().size(), -1.0)));
        const OracleResult oracle = bruteForceOracle(grid, 0.0);
        REQUIRE(oracle.feasible);
        CHECK(sched.gammaMax == oracle.gamma);
        CHECK(sched.predictedSlackTotal() == doctest::Approx(0.0));
    }
}

TEST_CASE("a violation budget buys later starts through the slacks") {
    const ScenarioData s = loadFixture("tiny/seed_1");
    const auto keys = underKeys(s);
    const ClaModel cla = cutoffModel(s, keys, 2, 1.06, 0.91);
    int previous = 0;
    for (const double lambda : {0.0, 0.05, 0.5, 50.0}) {
        const EevcInstance inst{&s, keys, lambda, true};
        const EevcProgram ep = buildProgram(inst, cla);
        const mp::Solution sol = mp::solveMilp(ep.program, eevcMilpOptions(ep));
        if (sol.status != mp::Status::optimal) {
            CHECK(lambda == 0.0);
            continue;
        }
        const ChargeSchedule sched = decode(ep, sol, inst);
        CHECK(sched.gammaMax >= previous);
        CHECK(sched.predictedSlackTotal() <= lambda + 1e-6);
        previous = sched.gammaMax;
    }
    CHECK(previous == naiveGamma(s));
}

TEST_CASE("decoding rejects fractional or inconsistent solutions") {
    const ScenarioData s = loadFixture("tiny/seed_2");
    const EevcInstance inst{&s, {}, 0.0, false};
    const EevcProgram ep = buildProgram(inst, ClaModel{});
    const mp::Solution good = mp::solveMilp(ep.program, eevcMilpOptions(ep));
    REQUIRE(std::string(mp::toString(good.status)) == "optimal");

    mp::Solution frac = good;
    frac.values[ep.layout.cTaz[0][3]] = 0.5;
    CHECK_THROWS_AS(decode(ep, frac, inst), ScheduleError);

    mp::Solution split = good;
    for (std::size_t t = 0; t < 2; ++t) split.values[ep.layout.cTaz[0][t]] = 1.0;
    CHECK_THROWS_AS(decode(ep, split, inst), ScheduleError);

    CHECK_THROWS_AS(decode(ep, mp::Solution{}, inst), SolverError);
}

TEST_CASE("solver hints rank tau before TAZ flags before the rest") {
    const ScenarioData s = loadFixture("tiny/seed_1");
    const EevcProgram ep = buildProgram(EevcInstance{&s, {}, 0.0, false}, ClaModel{});
    const mp::MilpOptions opts = eevcMilpOptions(ep);
    REQUIRE(opts.branchPriority.size() == ep.program.variables().size());
    CHECK(opts.branchPriority[ep.layout.tau[0]] > opts.branchPriority[ep.layout.cTaz[0][0]]);
    CHECK(opts.branchPriority[ep.layout.cTaz[0][0]] > opts.branchPriority[ep.layout.cEv[0][0]]);
    CHECK(opts.objectiveGranularity == 1.0);
}

TEST_CASE("a configured external MILP solver solves a tiny schedule like branch-and-bound") {
    const char* tmpl = std::getenv("EVAC_EXTERNAL_SOLVER");
    if (tmpl == nullptr || *tmpl == '\0') {
        MESSAGE("skipped: EVAC_EXTERNAL_SOLVER is not set");
        return;
    }
    const ScenarioData s = loadFixture("tiny/seed_1");
    const auto keys = underKeys(s);
    const EevcInstance inst{&s, keys, 0.0, true};
    const EevcProgram ep = buildProgram(inst, cutoffModel(s, keys, 7, 1.06, 0.91));
    const mp::Solution ours = mp::solveMilp(ep.program, eevcMilpOptions(ep));
    const mp::Solution theirs = mp::solveExternal(ep.program, tmpl, testing::scratchDir("eevc_external"));
    CHECK(theirs.objective == doctest::Approx(ours.objective).epsilon(1e-6));
    CHECK(decode(ep, theirs, inst).gammaMax == decode(ep, ours, inst).gammaMax);
}
