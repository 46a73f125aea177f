#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "evac/congen.hpp"
#include "evac/eevc.hpp"

using namespace evac;

static void BM_NaiveScheduleMilp(benchmark::State& state) {
    const ScenarioData s = bench::loadBundled("weak_feeder");
    const EevcInstance inst{&s, {}, 0.0, false};
    const EevcProgram ep = buildProgram(inst, ClaModel{});
    const mp::MilpOptions opts = eevcMilpOptions(ep);
    for (auto _ : state) benchmark::DoNotOptimize(mp::solveMilp(ep.program, opts));
}
BENCHMARK(BM_NaiveScheduleMilp)->Unit(benchmark::kMillisecond);

static void BM_ConstraintGenerationTiny(benchmark::State& state) {
    const ScenarioData s = bench::loadBundled("tiny/seed_1");
    const PowerFlowResponse grid(s);
    CongenConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(runCongen(grid, cfg));
}
BENCHMARK(BM_ConstraintGenerationTiny)->Unit(benchmark::kMillisecond);
