#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evac::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitInfeasible = 2,
    kExitIterationLimit = 3,
};

// Everything one invocation needs, filled from the command line.
struct RunConfig {
    std::string subcommand;
    std::filesystem::path network;
    std::filesystem::path loads;
    std::filesystem::path evs;
    std::filesystem::path tazs;
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambdaMax;
    std::vector<double> lambdas;
    std::size_t sampleCount = 0;
    int maxIterations = 10;
    bool naive = false;
    int jobs = 1;
    bool externalSolver = false;
    bool timings = false;
};

// Runs the command line `args` (without the program name). Tabular results of `pf` and the
// `netcheck` summary go to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evac::cli
