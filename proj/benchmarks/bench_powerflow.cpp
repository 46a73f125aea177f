#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "evac/grid_response.hpp"
#include "evac/powerflow.hpp"
#include "evac/synthetic.hpp"

using namespace evac;

static void BM_SweepMixedFeeder(benchmark::State& state) {
    const ScenarioData s = bench::loadBundled("mixed_feeder");
    const PowerFlowSolver solver(s.network());
    const std::vector<std::uint8_t> on(s.evs().size(), 1);
    const InjectionSnapshot snap = makeSnapshot(s, s.horizon() / 2, on);
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(snap.demandPu));
}
BENCHMARK(BM_SweepMixedFeeder);

static void BM_SweepSyntheticBuses(benchmark::State& state) {
    FeederSpec spec;
    spec.buses = static_cast<int>(state.range(0));
    spec.phases = PhasePattern::three;
    spec.config.horizon = 4;
    spec.config.beta = 4;
    const ScenarioData s = generateSyntheticFeeder(spec);
    const PowerFlowSolver solver(s.network());
    const std::vector<std::uint8_t> on(s.evs().size(), 1);
    const InjectionSnapshot snap = makeSnapshot(s, 2, on);
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(snap.demandPu));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SweepSyntheticBuses)->RangeMultiplier(4)->Range(8, 512)->Complexity();

static void BM_HorizonSimulation(benchmark::State& state) {
    const ScenarioData s = bench::loadBundled("weak_feeder");
    const PowerFlowResponse grid(s);
    const std::vector<std::uint8_t> on(s.evs().size(), 1);
    for (auto _ : state) {
        for (int t = 1; t <= s.horizon(); ++t) benchmark::DoNotOptimize(grid.squaredVoltages(t, on));
    }
}
BENCHMARK(BM_HorizonSimulation);
