#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "evac/cla.hpp"
#include "evac/grid_response.hpp"

using namespace evac;

static void BM_FitOverEstimator(benchmark::State& state) {
    const ScenarioData s = bench::loadBundled("mixed_feeder");
    const PowerFlowResponse grid(s);
    SampleSet set = drawSamples(s, static_cast<std::size_t>(state.range(0)), 1);
    const std::size_t node = s.network().nodes().size() - 1;
    const std::vector<std::size_t> nodes = {node};
    const std::vector<int> times = {s.horizon()};
    computeTargets(grid, set, nodes, times);
    for (auto _ : state) benchmark::DoNotOptimize(fitCla(set, node, s.horizon(), Sense::over));
}
BENCHMARK(BM_FitOverEstimator)->Arg(30)->Arg(60)->Arg(120);

static void BM_SampleTargets(benchmark::State& state) {
    const ScenarioData s = bench::loadBundled("mixed_feeder");
    const PowerFlowResponse grid(s);
    std::vector<std::size_t> nodes(s.network().nodes().size());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
    const std::vector<int> times = {s.horizon() / 2};
    for (auto _ : state) {
        SampleSet set = drawSamples(s, defaultSampleCount(s), 1);
        computeTargets(grid, set, nodes, times, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(set.targets.size());
    }
}
BENCHMARK(BM_SampleTargets)->Arg(1)->Arg(4);
