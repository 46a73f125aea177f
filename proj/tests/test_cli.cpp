#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "json.hpp"

#include "cli.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using evac::testing::dataDir;
using evac::testing::scratchDir;

namespace {

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = evac::cli::run(args, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string fixture(const std::string& name) { return (dataDir() / name).string(); }

}  // namespace

TEST_CASE("solve writes identical artifacts on repeated runs") {
    const fs::path a = scratchDir("cli_solve_a"), b = scratchDir("cli_solve_b");
    for (const fs::path& dir : {a, b}) {
        const Outcome o = run({"solve", "--scenario", fixture("tiny/seed_1"), "--seed", "3", "--out", dir.string()});
        REQUIRE_MESSAGE(o.code == evac::cli::kExitOk, o.err);
    }
    for (const char* file : {"schedule.csv", "evs_schedule.csv", "gantt.json", "trace.csv", "cla.json", "summary.json"}) {
        CAPTURE(file);
        REQUIRE(fs::exists(a / file));
        CHECK(slurp(a / file) == slurp(b / file));
    }
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(summary["status"] == "converged");
    CHECK(summary["gamma_max"] == 7);
    CHECK(summary["violation_total"] == 0.0);
    CHECK(summary.contains("provenance"));
}

TEST_CASE("a huge budget matches the naive mode") {
    const fs::path a = scratchDir("cli_naive"), b = scratchDir("cli_loose");
    REQUIRE(run({"solve", "--scenario", fixture("weak_feeder"), "--naive", "--out", a.string()}).code == 0);
    REQUIRE(run({"solve", "--scenario", fixture("weak_feeder"), "--seed", "1", "--lambda-max", "1e6", "--out", b.string()}).code == 0);
    const auto na = nlohmann::json::parse(slurp(a / "summary.json"));
    const auto nb = nlohmann::json::parse(slurp(b / "summary.json"));
    CHECK(na["gamma_max"] == nb["gamma_max"]);
    CHECK(na["violation_total"] == nb["violation_total"]);
    CHECK(slurp(a / "schedule.csv").substr(slurp(a / "schedule.csv").find("taz,t")) ==
          slurp(b / "schedule.csv").substr(slurp(b / "schedule.csv").find("taz,t")));
}

TEST_CASE("iteration cap and infeasibility map to their exit codes") {
    const fs::path dir = scratchDir("cli_capped");
    const Outcome capped = run({"solve", "--scenario", fixture("weak_feeder"), "--seed", "1", "--max-iters", "1", "--out", dir.string()});
    CHECK(capped.code == evac::cli::kExitIterationLimit);
    CHECK(nlohmann::json::parse(slurp(dir / "summary.json"))["status"] == "iteration_limit");
}

TEST_CASE("input and usage errors exit with status 1 and a message") {
    const fs::path dir = scratchDir("cli_errors");
    const std::string missing = (dir / "nowhere.json").string();
    const Outcome o = run({"netcheck", "--network", missing, "--loads", missing, "--evs", missing, "--tazs", missing});
    CHECK(o.code == evac::cli::kExitError);
    CHECK(o.err.find("nowhere.json") != std::string::npos);
    CHECK(o.err.find("evacharge netcheck: error:") != std::string::npos);

    const Outcome noSeed = run({"solve", "--scenario", fixture("tiny/seed_1"), "--out", dir.string()});
    CHECK(noSeed.code == evac::cli::kExitError);
    CHECK(noSeed.err.find("--seed") != std::string::npos);

    const Outcome empty = run({"sweep", "--scenario", fixture("tiny/seed_1"), "--seed", "1", "--lambdas", "", "--out", dir.string()});
    CHECK(empty.code == evac::cli::kExitError);
    const Outcome negative = run({"sweep", "--scenario", fixture("tiny/seed_1"), "--seed", "1", "--lambdas", "0,-1", "--out", dir.string()});
    CHECK(negative.code == evac::cli::kExitError);

    ::unsetenv("EVAC_EXTERNAL_SOLVER");
    const Outcome ext = run({"solve", "--scenario", fixture("tiny/seed_1"), "--seed", "1", "--external-solver", "--out", dir.string()});
    CHECK(ext.code == evac::cli::kExitError);
    CHECK(ext.err.find("EVAC_EXTERNAL_SOLVER") != std::string::npos);

    CHECK(run({"frobnicate"}).code == evac::cli::kExitError);
    CHECK(run({"--help"}).code == evac::cli::kExitOk);
}

TEST_CASE("sweep sorts budgets, writes per-budget runs and a report") {
    const fs::path dir = scratchDir("cli_sweep");
    const Outcome o = run({"sweep", "--scenario", fixture("tiny/seed_1"), "--seed", "1", "--lambdas", "1,0,1", "--out", dir.string()});
    REQUIRE_MESSAGE(o.code == 0, o.err);
    CHECK(o.err.find("repeated") != std::string::npos);
    const std::string csv = slurp(dir / "sweep.csv");
    const auto zero = csv.find("\n0,");
    const auto one = csv.find("\n1,");
    REQUIRE(zero != std::string::npos);
    REQUIRE(one != std::string::npos);
    CHECK(zero < one);
    CHECK(fs::exists(dir / "lambda_0" / "summary.json"));
    CHECK(fs::exists(dir / "lambda_1" / "summary.json"));

    REQUIRE(run({"report", "--out", dir.string()}).code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    REQUIRE(report["tradeoff"].size() == 2);
    CHECK(report["tradeoff"][0]["charge_time_steps"].get<int>() >= report["tradeoff"][1]["charge_time_steps"].get<int>());
}

TEST_CASE("report lists Gantt bars and idle gaps") {
    const fs::path dir = scratchDir("cli_report");
    REQUIRE(run({"solve", "--scenario", fixture("mixed_feeder"), "--naive", "--out", dir.string()}).code == 0);
    REQUIRE(run({"report", "--out", dir.string()}).code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    REQUIRE(report["gantt"]["bars"].size() == 3);
    for (const auto& gap : report["gantt"]["idle_gaps"]) {
        CHECK(gap["steps"].get<int>() == gap["end_t"].get<int>() - gap["start_t"].get<int>() + 1);
    }
    CHECK(report["iterations"].size() == 1);
    CHECK(run({"report", "--out", scratchDir("cli_report_empty").string()}).code == evac::cli::kExitError);
}

TEST_CASE("pf prints one row per node") {
    const std::string dir = fixture("tiny/seed_2");
    const Outcome o = run({"pf", "--network", dir + "/network.json", "--loads", dir + "/loads.csv", "--config", dir + "/config.json", "--t", "4"});
    REQUIRE_MESSAGE(o.code == 0, o.err);
    CHECK(o.out.rfind("# ", 0) == 0);
    const auto header = o.out.find("node,mag_pu,angle_deg,v_pu2\n");
    REQUIRE(header != std::string::npos);
    const std::string body = o.out.substr(header);
    // Five single-phase buses.
    CHECK(std::count(body.begin(), body.end(), '\n') == 6);
}

TEST_CASE("generate, netcheck and oracle work together") {
    const fs::path dir = scratchDir("cli_generate");
    REQUIRE(run({"generate", "--preset", "tiny", "--seed", "1", "--out", dir.string()}).code == 0);
    for (const char* f : {"network.json", "loads.csv", "evs.csv", "tazs.csv", "config.json"}) {
        CHECK(slurp(dir / f) == slurp(dataDir() / "tiny/seed_1" / f));
    }
    const Outcome check = run({"netcheck", "--scenario", dir.string()});
    CHECK(check.code == 0);
    CHECK(check.out.find("latest_start") != std::string::npos);
    const Outcome oracle = run({"oracle", "--scenario", dir.string(), "--out", dir.string()});
    REQUIRE_MESSAGE(oracle.code == 0, oracle.err);
    const auto res = nlohmann::json::parse(slurp(dir / "oracle.json"));
    CHECK(res["feasible"] == true);
    CHECK(res["gamma_max"] == 7);
}

TEST_CASE("the installed binary reports failures through its exit status") {
    const std::string exe = EVACHARGE_EXE;
    const fs::path dir = scratchDir("cli_exe");
    const auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status(exe + " --help") == 0);
    CHECK(status(exe + " netcheck --scenario " + (dir / "missing").string()) == 1);
    CHECK(status(exe + " solve --scenario " + fixture("weak_feeder") + " --seed 1 --max-iters 1 --out " + dir.string()) == 3);
}
