#include "doctest.h"

#include <cmath>
#include <string>

#include "evac/csv.hpp"
#include "evac/errors.hpp"
#include "evac/netmodel.hpp"
#include "evac/synthetic.hpp"
#include "fixtures.hpp"

using namespace evac;
using evac::testing::loadFixture;
using evac::testing::scratchDir;

namespace {

std::string lineJson(const std::string& from, const std::string& to, const std::string& phases = "a") {
    std::string z = "[";
    const std::size_t n = phases.size();
    for (std::size_t r = 0; r < n; ++r) {
        z += r ? ",[" : "[";
        for (std::size_t c = 0; c < n; ++c) z += std::string(c ? "," : "") + (r == c ? "[0.01,0.02]" : "[0.002,0.004]");
        z += "]";
    }
    z += "]";
    return R"({"from":")" + from + R"(","to":")" + to + R"(","phases":")" + phases + R"(","z_pu":)" + z + "}";
}

std::string networkJson(const std::string& buses, const std::string& lines) {
    return R"({"base_kv":4.16,"base_kva":1000,"source":{"bus":"s"},"buses":[)" + buses + R"(],"lines":[)" + lines + "]}";
}

std::string bus(const std::string& id, const std::string& phases = "a") {
    return R"({"id":")" + id + R"(","phases":")" + phases + R"("})";
}

}  // namespace

TEST_CASE("phase sets and node ids parse canonically") {
    CHECK(PhaseSet::fromString("cab").str() == "abc");
    CHECK(PhaseSet::fromString("b").size() == 1);
    CHECK(PhaseSet::fromString("ab").isSubsetOf(PhaseSet::all()));
    CHECK_THROWS_AS(PhaseSet::fromString("aa"), InputError);
    CHECK_THROWS_AS(PhaseSet::fromString("d"), InputError);
    const NodeId n = NodeId::parse("feeder_7.c");
    CHECK(n.bus == "feeder_7");
    CHECK(n.phase == Phase::c);
    CHECK(n.str() == "feeder_7.c");
    CHECK_THROWS_AS(NodeId::parse("nophase"), InputError);
}

TEST_CASE("a radial network builds its orientation from the source") {
    const NetworkModel net = parseNetworkJson(networkJson(bus("s", "abc") + "," + bus("m", "abc") + "," + bus("x", "b"),
                                                          lineJson("m", "s", "abc") + "," + lineJson("m", "x", "b")));
    CHECK(net.nodes().size() == 7);
    CHECK(net.breadthFirstOrder().front() == net.sourceIndex());
    const std::size_t m = *net.busIndex("m");
    const std::size_t x = *net.busIndex("x");
    CHECK(net.parentBus(x) == m);
    CHECK(net.parentBus(m) == net.sourceIndex());
    CHECK(net.isDownstream(m, x));
    CHECK_FALSE(net.isDownstream(x, m));
    CHECK(net.nodeIndex(x, Phase::a) == -1);
    CHECK(net.nodeIndex(x, Phase::b) >= 0);
    CHECK(net.kwToPu(500.0) == doctest::Approx(0.5));
}

TEST_CASE("topology errors are rejected with the offending element") {
    SUBCASE("cycle") {
        const auto text = networkJson(bus("s") + "," + bus("a") + "," + bus("b"),
                                      lineJson("s", "a") + "," + lineJson("a", "b") + "," + lineJson("b", "s"));
        CHECK_THROWS_AS(parseNetworkJson(text), TopologyError);
    }
    SUBCASE("disconnected bus") {
        const auto text = networkJson(bus("s") + "," + bus("a") + "," + bus("b") + "," + bus("c"),
                                      lineJson("s", "a") + "," + lineJson("b", "c") + "," + lineJson("c", "b"));
        CHECK_THROWS_AS(parseNetworkJson(text), TopologyError);
    }
    SUBCASE("phase carried that the parent lacks") {
        const auto text = networkJson(bus("s", "a") + "," + bus("a", "ab"), lineJson("s", "a", "ab"));
        try {
            parseNetworkJson(text);
            FAIL("expected a topology error");
        } catch (const TopologyError& e) {
            CHECK(std::string(e.what()).find("phase mismatch") != std::string::npos);
        }
    }
    SUBCASE("unknown bus in a line") {
        CHECK_THROWS_AS(parseNetworkJson(networkJson(bus("s") + "," + bus("a"), lineJson("s", "zz"))), InputError);
    }
    SUBCASE("asymmetric impedance") {
        const auto text = networkJson(
            bus("s", "ab") + "," + bus("a", "ab"),
            R"({"from":"s","to":"a","phases":"ab","z_pu":[[[0.01,0.02],[0.003,0.001]],[[0.002,0.001],[0.01,0.02]]]})");
        CHECK_THROWS_AS(parseNetworkJson(text), InputError);
    }
    SUBCASE("malformed json") { CHECK_THROWS_AS(parseNetworkJson("{"), InputError); }
}

TEST_CASE("missing files name the path") {
    try {
        parseNetwork("/nonexistent/dir/network.json");
        FAIL("expected an input error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/network.json") != std::string::npos);
    }
}

TEST_CASE("config parsing accepts known keys and rejects unknown ones") {
    const auto dir = scratchDir("config");
    writeTextFile(dir / "ok.json", R"({"T": 8, "beta": 4, "lambda_max": 0.5, "provenance": {"tool": "x"}})");
    const ScenarioConfig c = parseConfig(dir / "ok.json");
    CHECK(c.horizon == 8);
    CHECK(c.beta == 4);
    CHECK(c.lambdaMax == 0.5);
    CHECK(c.vMax == doctest::Approx(1.1025));

    writeTextFile(dir / "bad.json", R"({"T": 8, "horizon_steps": 4})");
    CHECK_THROWS_AS(parseConfig(dir / "bad.json"), InputError);
    writeTextFile(dir / "frac.json", R"({"T": 8.5})");
    CHECK_THROWS_AS(parseConfig(dir / "frac.json"), InputError);
    CHECK(parseConfig({}).horizon == 96);
}

TEST_CASE("every bundled fixture loads and derives EV data") {
    for (const auto& name : evac::testing::fixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        CHECK(!s.evs().empty());
        for (std::size_t h = 0; h < s.evs().size(); ++h) {
            CHECK(s.evSteps(h) == static_cast<int>(std::lround((1.0 - s.evs()[h].soc0) * s.beta())));
            CHECK(s.network().nodes()[s.evNodeIndex(h)] == s.evs()[h].node);
            CHECK(s.evBuses()[s.evBusSlot(h)] == s.evs()[h].node.bus);
        }
        for (std::size_t k = 0; k < s.tazs().size(); ++k) {
            int w = 0;
            for (std::size_t h : s.tazEvs(k)) w = std::max(w, s.evSteps(h));
            CHECK(s.tazWindow(k) == w);
        }
    }
}

TEST_CASE("scenarios round-trip through their files") {
    for (const auto& name : evac::testing::fixtureNames()) {
        CAPTURE(name);
        const ScenarioData s = loadFixture(name);
        const auto dir = scratchDir("roundtrip");
        Provenance prov;
        prov.seed = 3;
        const ScenarioPaths p = writeScenario(s, dir, &prov);
        const ScenarioData back = loadScenario(p);
        CHECK(scenarioHash(back) == scenarioHash(s));
        CHECK(networkToJson(back.network()) == networkToJson(s.network()));
        CHECK(loadsToCsv(back) == loadsToCsv(s));
    }
}

TEST_CASE("scenario validation rejects inconsistent evacuation data") {
    const ScenarioData base = loadFixture("tiny/seed_1");
    const auto dir = scratchDir("badscenario");
    const ScenarioPaths p = writeScenario(base, dir);

    SUBCASE("EV on an unknown node") {
        writeTextFile(p.evs, "ev_id,taz_id,node,soc0\ne1,z1,nowhere.a,0.5\n");
        CHECK_THROWS_AS(loadScenario(p), InputError);
    }
    SUBCASE("departure outside the horizon") {
        writeTextFile(p.tazs, "taz_id,departure_t\nz1,99\nz2,5\n");
        CHECK_THROWS_AS(loadScenario(p), InputError);
    }
    SUBCASE("initial charge not on the beta grid") {
        std::string evs = readTextFile(p.evs);
        const auto pos = evs.rfind(",0.5");
        REQUIRE(pos != std::string::npos);
        evs.replace(pos, 4, ",0.3");
        writeTextFile(p.evs, evs);
        CHECK_THROWS_AS(loadScenario(p), InputError);
    }
    SUBCASE("load row for a time step past the horizon") {
        writeTextFile(p.loads, "node,t,p_kw,q_kvar\nb1.a,13,1,0\n");
        CHECK_THROWS_AS(loadScenario(p), InputError);
    }
    SUBCASE("wrong csv header") {
        writeTextFile(p.tazs, "taz,departure\nz1,5\n");
        CHECK_THROWS_AS(loadScenario(p), InputError);
    }
}

TEST_CASE("synthetic feeders are deterministic per seed") {
    FeederSpec spec;
    spec.buses = 7;
    spec.phases = PhasePattern::mixed;
    spec.config.horizon = 8;
    spec.config.beta = 4;
    spec.seed = 11;
    const ScenarioData a = generateSyntheticFeeder(spec);
    const ScenarioData b = generateSyntheticFeeder(spec);
    CHECK(scenarioHash(a) == scenarioHash(b));
    spec.seed = 12;
    CHECK(scenarioHash(generateSyntheticFeeder(spec)) != scenarioHash(a));
    CHECK(summerLoadShape(18.0) > summerLoadShape(4.0));
}
