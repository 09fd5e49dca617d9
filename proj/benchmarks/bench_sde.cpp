#include <benchmark/benchmark.h>

#include <cmath>

#include "meanrev/sde.hpp"
#include "meanrev/spectral.hpp"

using namespace meanrev;

namespace {

sde::SdeParams params(int paths, int steps) {
    sde::SdeParams p;
    p.theta = 0.05;
    p.sigma = 0.5;
    p.r0 = 1.0;
    p.T = 0.5;
    p.steps = steps;
    p.paths = paths;
    p.master_seed = 42;
    return p;
}

sde::AlphaField solver_field() {
    auto cfg = spectral::make_config(16, 0.5, 0.5, 2048,
                                     spectral::Direction::well_posed_reverse);
    const auto g0 = spectral::sample_grid(cfg.M, [](double x) { return 0.5 * std::sin(x); });
    return sde::AlphaField::from_trajectory(
        spectral::evolve(spectral::init_coeffs(g0, cfg), cfg));
}

}  // namespace

static void BM_LogEulerConstantField(benchmark::State& state) {
    const auto p = params(static_cast<int>(state.range(0)), 256);
    const auto alpha = sde::AlphaField::constant(0.3);
    for (auto _ : state) {
        auto e = sde::simulate_log_euler(p, alpha, 1);
        benchmark::DoNotOptimize(e);
    }
    state.SetItemsProcessed(state.iterations() * p.paths * p.steps);
}
BENCHMARK(BM_LogEulerConstantField)->Arg(256)->Arg(1024);

static void BM_LogEulerSolverField(benchmark::State& state) {
    const auto p = params(static_cast<int>(state.range(0)), 256);
    static const auto alpha = solver_field();
    for (auto _ : state) {
        auto e = sde::simulate_log_euler(p, alpha, 1);
        benchmark::DoNotOptimize(e);
    }
    state.SetItemsProcessed(state.iterations() * p.paths * p.steps);
}
BENCHMARK(BM_LogEulerSolverField)->Arg(256)->Arg(1024);

static void BM_GirsanovDensity(benchmark::State& state) {
    const auto p = params(static_cast<int>(state.range(0)), 256);
    static const auto alpha = solver_field();
    const auto e = sde::simulate_log_euler(p, alpha, 1);
    for (auto _ : state) {
        auto L = sde::girsanov_log_density(e, p, alpha);
        benchmark::DoNotOptimize(L);
    }
    state.SetItemsProcessed(state.iterations() * p.paths * p.steps);
}
BENCHMARK(BM_GirsanovDensity)->Arg(256)->Arg(1024);

static void BM_ReconstructZ(benchmark::State& state) {
    static const auto alpha = solver_field();
    for (auto _ : state) {
        auto Z = sde::reconstruct_Z(alpha, 0.0, 0.5);
        benchmark::DoNotOptimize(Z);
    }
}
BENCHMARK(BM_ReconstructZ);

BENCHMARK_MAIN();
