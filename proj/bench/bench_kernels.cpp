// Serial reference vs OpenMP path kernels, plus the lattice building blocks.
#include <benchmark/benchmark.h>

#include "spdelab/harness.hpp"
#include "spdelab/lattice.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/sode.hpp"
#include "spdelab/spde.hpp"

using namespace spdelab;

namespace {

SpdeConfig spde_case() {
    SpdeConfig c;
    c.trunc = 10.0;
    c.horizon = 0.01;
    c.u0 = constant_field(c.grid, 1.0);
    c.sample_every = 10;
    return c;
}

// Arg 0 is the worker count; 1 runs the serial reference loop.
void BM_SpdePaths(benchmark::State& state) {
    const int workers = static_cast<int>(state.range(0));
    const SpdeConfig cfg = spde_case();
    const std::size_t paths = 64;
    for (auto _ : state) {
        auto out = map_paths<double>(paths, workers, [&](std::size_t i) {
            return simulate_truncated(cfg, derive_stream(7, i)).mass.back();
        });
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * paths * cfg.steps()));
}
BENCHMARK(BM_SpdePaths)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SodePaths(benchmark::State& state) {
    const int workers = static_cast<int>(state.range(0));
    SodeConfig cfg;
    cfg.horizon = 1.0;
    const std::size_t paths = 256;
    for (auto _ : state) {
        auto out = map_paths<double>(paths, workers, [&](std::size_t i) {
            return simulate_euler(cfg, derive_stream(7, i)).running_max;
        });
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * paths * cfg.steps()));
}
BENCHMARK(BM_SodePaths)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_StencilHeatFlow(benchmark::State& state) {
    const auto g = GridSpec::make(static_cast<int>(state.range(0)));
    const double dt = 0.25 * g.h * g.h;
    Field f = constant_field(g, 1.0);
    f[0] = 2.0;
    Field lap(g.size());
    for (auto _ : state) {
        apply_discrete_laplacian(f, g, lap);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += dt * lap[i];
        benchmark::DoNotOptimize(f.data());
    }
}
BENCHMARK(BM_StencilHeatFlow)->Arg(64)->Arg(256);

void BM_SpectralSemigroup(benchmark::State& state) {
    const auto g = GridSpec::make(static_cast<int>(state.range(0)));
    Field f = constant_field(g, 1.0);
    f[0] = 2.0;
    for (auto _ : state) benchmark::DoNotOptimize(apply_heat_semigroup(f, 1e-3, g));
}
BENCHMARK(BM_SpectralSemigroup)->Arg(64)->Arg(256);

void BM_CyclicSolve(benchmark::State& state) {
    const auto g = GridSpec::make(static_cast<int>(state.range(0)));
    const CyclicHeatSolver solver(g, 1e-4);
    Field f = constant_field(g, 1.0);
    for (auto _ : state) {
        solver.solve(f);
        benchmark::DoNotOptimize(f.data());
    }
}
BENCHMARK(BM_CyclicSolve)->Arg(64)->Arg(256);

void BM_Slab(benchmark::State& state) {
    const auto g = GridSpec::make(64);
    const NoiseStream s = derive_stream(1, 0);
    Slab slab(g.size());
    std::uint64_t step = 0;
    for (auto _ : state) {
        sample_slab(s, step++, g, 1e-4, slab);
        benchmark::DoNotOptimize(slab.data());
    }
}
BENCHMARK(BM_Slab);

}  // namespace

BENCHMARK_MAIN();
