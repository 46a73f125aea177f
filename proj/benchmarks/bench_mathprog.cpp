#include <benchmark/benchmark.h>

#include <random>

#include "evac/mathprog.hpp"

using namespace evac::mp;

namespace {

// Dense random packing LP: maximize c'x subject to Ax <= b, 0 <= x <= 1.
Program packing(int vars, int rows, bool binary, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    Program p;
    for (int j = 0; j < vars; ++j) {
        if (binary) {
            p.addBinary("x" + std::to_string(j));
        } else {
            p.addVariable("x" + std::to_string(j), VarKind::continuous, 0.0, 1.0);
        }
    }
    for (int i = 0; i < rows; ++i) {
        std::vector<Term> terms;
        for (int j = 0; j < vars; ++j) terms.push_back({static_cast<std::size_t>(j), u(rng)});
        p.addConstraint("r" + std::to_string(i), terms, Relation::le, 0.3 * vars);
    }
    std::vector<Term> obj;
    for (int j = 0; j < vars; ++j) obj.push_back({static_cast<std::size_t>(j), u(rng)});
    p.setObjective(ObjSense::maximize, obj);
    return p;
}

}  // namespace

static void BM_SimplexPacking(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Program p = packing(n, n / 2, false, 1);
    for (auto _ : state) benchmark::DoNotOptimize(solveLp(p));
}
BENCHMARK(BM_SimplexPacking)->Arg(20)->Arg(80)->Arg(200);

static void BM_BranchAndBoundKnapsack(benchmark::State& state) {
    const Program p = packing(static_cast<int>(state.range(0)), 2, true, 2);
    for (auto _ : state) benchmark::DoNotOptimize(solveMilp(p));
}
BENCHMARK(BM_BranchAndBoundKnapsack)->Arg(10)->Arg(16)->Arg(22);
