#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "evac/csv.hpp"
#include "evac/errors.hpp"
#include "evac/grid_response.hpp"
#include "evac/oracle.hpp"
#include "evac/schedule.hpp"
#include "evac/simulate.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace evac;
using evac::testing::loadFixture;
using evac::testing::cutoffResponse;
using evac::testing::latestStarts;

TEST_CASE("schedules built from start times satisfy every charging rule") {
    for (const auto& name : testing::fixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        std::vector<int> starts = latestStarts(s);
        for (int shift = 0; shift < 3; ++shift) {
            std::vector<int> st = starts;
            for (int& v : st) v = std::max(1, v - shift);
            const ChargeSchedule sched = scheduleFromStarts(s, st);
            CHECK(testing::scheduleInvariantBreach(s, sched) == "");
            CHECK_NOTHROW(validateSchedule(s, sched, 0.0));
            CHECK(sched.gammaMax == *std::min_element(st.begin(), st.end()));
            for (int t = 1; t <= s.horizon(); ++t) CHECK(sched.tau[static_cast<std::size_t>(t - 1)] == (t >= sched.gammaMax ? 1 : 0));
        }
    }
}

TEST_CASE("schedule validation names the broken rule") {
    const ScenarioData s = loadFixture("tiny/seed_3");
    const std::vector<int> starts = latestStarts(s);
    const ChargeSchedule good = scheduleFromStarts(s, starts);
    auto expectBreach = [&](ChargeSchedule bad, const std::string& fragment) {
        deriveScheduleState(bad, s);
        try {
            validateSchedule(s, bad, 0.0);
            FAIL("expected a schedule error mentioning " << fragment);
        } catch (const ScheduleError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
        CHECK_FALSE(testing::scheduleInvariantBreach(s, bad).empty());
    };

    SUBCASE("EV charging while its TAZ is idle") {
        ChargeSchedule bad = good;
        const std::size_t h = s.tazEvs(0).front();
        bad.evCharging[h][static_cast<std::size_t>(starts[0] - 2)] = 1;
        expectBreach(bad, "EV");
    }
    SUBCASE("split TAZ window") {
        ChargeSchedule bad = good;
        const std::size_t k = 0;
        bad.tazCharging[k][static_cast<std::size_t>(starts[k] - 3)] = 1;
        expectBreach(bad, "TAZ");
    }
    SUBCASE("EV not full at departure") {
        ChargeSchedule bad = good;
        for (std::size_t h : s.tazEvs(1)) std::fill(bad.evCharging[h].begin(), bad.evCharging[h].end(), 0);
        std::fill(bad.tazCharging[1].begin(), bad.tazCharging[1].end(), 0);
        expectBreach(bad, "TAZ");
    }
    SUBCASE("window past the departure") {
        std::vector<int> late = starts;
        late[0] += 1;
        const auto T = s.horizon();
        if (late[0] + s.tazWindow(0) - 1 <= T) {
            const ChargeSchedule bad = scheduleFromStarts(s, late);
            CHECK_THROWS_AS(validateSchedule(s, bad, 0.0), ScheduleError);
            CHECK_FALSE(testing::scheduleInvariantBreach(s, bad).empty());
        }
    }
}

TEST_CASE("schedule artifacts list windows and battery levels") {
    const ScenarioData s = loadFixture("tiny/seed_1");
    const std::vector<int> starts = latestStarts(s);
    const ChargeSchedule sched = scheduleFromStarts(s, starts);
    Provenance prov;
    prov.seed = 4;
    const std::string csv = scheduleToCsv(sched, s, prov);
    CHECK(csv.rfind("# tool: evacharge", 0) == 0);
    CHECK(csv.find("taz,t,charging\n") != std::string::npos);
    const std::string gantt = ganttToJson(sched, s, prov);
    for (std::size_t k = 0; k < s.tazs().size(); ++k) {
        const std::string bar = "\"start_t\": " + std::to_string(starts[k]);
        CHECK(gantt.find(bar) != std::string::npos);
    }
    const std::string evs = evScheduleToCsv(sched, s, prov);
    CHECK(evs.find(s.evs()[0].id + ",0,0," + formatExact(s.evs()[0].soc0)) != std::string::npos);

    const auto demand = scheduleToDemand(sched, s);
    for (int t = 1; t <= s.horizon(); ++t) {
        CHECK(demand[static_cast<std::size_t>(t - 1)] == busDemandPu(s, sched.chargingAt(t)));
    }
}

TEST_CASE("violations are scored against both limits") {
    const ScenarioData s = loadFixture("tiny/seed_1");
    std::vector<double> v2(s.network().nodes().size(), 1.0);
    v2[1] = s.config().vMax + 0.01;
    v2[2] = s.config().vMin - 0.02;
    ViolationReport report;
    scoreViolations(s, 5, v2, report);
    REQUIRE(report.count() == 2);
    CHECK(std::string(toString(report.entries[0].kind)) == "over");
    CHECK(report.entries[0].magnitude == doctest::Approx(0.01));
    CHECK(std::string(toString(report.entries[1].kind)) == "under");
    CHECK(report.entries[1].magnitude == doctest::Approx(0.02));
    CHECK(report.total() == doctest::Approx(0.03));
    CHECK(withinBudget(report, 0.03 + 1e-13));
    CHECK_FALSE(withinBudget(report, 0.029));
    const std::string csv = violationsToCsv(s, report, Provenance{});
    CHECK(csv.find("\ntotal,,,") != std::string::npos);
}

TEST_CASE("simulation flags exactly the steps that break the limits") {
    const ScenarioData s = loadFixture("tiny/seed_4");
    const AffineResponse grid = cutoffResponse(s, 6, 1.06, 0.91);
    const ChargeSchedule sched = scheduleFromStarts(s, latestStarts(s));
    const SimulationResult sim = simulateSchedule(grid, sched, 2);
    REQUIRE(sim.v2.size() == static_cast<std::size_t>(s.horizon()));
    for (const Violation& v : sim.report.entries) {
        CHECK(v.t > 6);
        CHECK(std::string(toString(v.kind)) == "under");
        const auto on = sched.chargingAt(v.t);
        CHECK(std::any_of(on.begin(), on.end(), [](auto c) { return c != 0; }));
    }
    CHECK(sim.report.count() > 0);
}

TEST_CASE("brute-force oracle finds the latest feasible starts") {
    for (const auto& name : testing::tinyFixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        const int cutoff = s.horizon() / 2 + 1;
        const AffineResponse grid = cutoffResponse(s, cutoff, 1.06, 0.91);
        // Every window must close by the cutoff; all else is free.
        int expected = s.horizon();
        for (std::size_t k = 0; k < s.tazs().size(); ++k) {
            const int w = s.tazWindow(k);
            expected = std::min(expected, std::min(s.tazs()[k].departure - w, cutoff - w + 1));
        }
        const OracleResult r = bruteForceOracle(grid, 0.0);
        REQUIRE(r.feasible);
        CHECK(r.gamma == expected);
        CHECK(r.violation == 0.0);

        // An unlimited budget leaves only the departures.
        const OracleResult free = bruteForceOracle(grid, 1e9);
        const auto starts = latestStarts(s);
        CHECK(free.gamma == *std::min_element(starts.begin(), starts.end()));
        CHECK_THROWS_AS(bruteForceOracle(grid, 0.0, 3), InputError);
    }
}

TEST_CASE("oracle reports infeasibility when no start works") {
    const ScenarioData s = loadFixture("tiny/seed_2");
    const AffineResponse grid = cutoffResponse(s, 0, 1.06, 0.91);
    const OracleResult r = bruteForceOracle(grid, 0.0);
    CHECK_FALSE(r.feasible);
    CHECK(r.evaluated > 0);
}

TEST_CASE("an idle schedule has gamma T and, on a generated base case, no violations") {
    for (const auto& name : testing::fixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        ChargeSchedule idle;
        idle.horizon = s.horizon();
        idle.tazCharging.assign(s.tazs().size(), std::vector<std::uint8_t>(static_cast<std::size_t>(s.horizon()), 0));
        idle.evCharging.assign(s.evs().size(), std::vector<std::uint8_t>(static_cast<std::size_t>(s.horizon()), 0));
        deriveScheduleState(idle, s);
        CHECK(idle.gammaMax == s.horizon());
        const SimulationResult sim = simulateSchedule(PowerFlowResponse(s), idle);
        CHECK(sim.report.count() == 0);
        CHECK(sim.report.total() == 0.0);
    }
}

TEST_CASE("gamma is the first charging step of any TAZ") {
    const ScenarioData s = loadFixture("weak_feeder");
    std::vector<int> starts = latestStarts(s);
    starts[1] -= 3;
    const ChargeSchedule sched = scheduleFromStarts(s, starts);
    int first = s.horizon();
    for (const auto& row : sched.tazCharging) {
        const auto it = std::find(row.begin(), row.end(), 1);
        if (it != row.end()) first = std::min(first, static_cast<int>(it - row.begin()) + 1);
    }
    CHECK(sched.gammaMax == first);
}

TEST_CASE("starting every TAZ at once on a weakened feeder sags below the limit at t=1") {
    const ScenarioData base = loadFixture("weak_feeder");
    ScenarioConfig cfg = base.config();
    cfg.rateKw *= 4.0;
    std::vector<std::vector<Complex>> bg;
    for (int t = 1; t <= base.horizon(); ++t) bg.push_back(base.backgroundKw(t));
    const ScenarioData s(base.network(), cfg, bg, base.tazs(), base.evs());
    const PowerFlowResponse grid(s);
    const std::vector<std::uint8_t> on(s.evs().size(), 1);
    const auto v2 = grid.squaredVoltages(1, on);
    REQUIRE(*std::min_element(v2.begin(), v2.end()) < s.config().vMin);

    const ChargeSchedule sched = scheduleFromStarts(s, std::vector<int>(s.tazs().size(), 1));
    const SimulationResult sim = simulateSchedule(grid, sched);
    const auto atOne = std::count_if(sim.report.entries.begin(), sim.report.entries.end(), [](const Violation& v) {
        return v.t == 1 && std::string(toString(v.kind)) == "under";
    });
    CHECK(atOne > 0);
}
