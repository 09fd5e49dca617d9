#include <benchmark/benchmark.h>

#include <random>

#include "meanrev/spectral.hpp"

using namespace meanrev::spectral;

namespace {

FourierState random_state(int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    FourierState s(N, 0.0);
    s.set_coeff(0, Complex{g(rng), 0.0});
    for (int k = 1; k <= N; ++k) {
        const Complex c{g(rng), g(rng)};
        s.set_coeff(k, c);
        s.set_coeff(-k, std::conj(c));
    }
    return s;
}

}  // namespace

static void BM_TruncatedConvolution(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto a = random_state(N, 1);
    const auto b = random_state(N, 2);
    for (auto _ : state) {
        auto c = truncated_convolution(a, b);
        benchmark::DoNotOptimize(c);
    }
    state.SetComplexityN(N);
}
BENCHMARK(BM_TruncatedConvolution)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_GalerkinStep(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto cfg = make_config(N, 1.0, 1e-4, 1, Direction::well_posed_reverse);
    const auto s = random_state(N, 3);
    for (auto _ : state) {
        auto out = galerkin_step(s, cfg);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(N);
}
BENCHMARK(BM_GalerkinStep)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_Synthesize(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto s = random_state(N, 4);
    for (auto _ : state) {
        auto g = synthesize(s, 4 * N);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_Synthesize)->RangeMultiplier(2)->Range(8, 128);

static void BM_Evolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = make_config(16, 1.0, 1e-5 * n, n, Direction::well_posed_reverse);
    const auto grid = sample_grid(cfg.M, [](double x) { return 0.5 * std::sin(x); });
    const auto s0 = init_coeffs(grid, cfg);
    for (auto _ : state) {
        auto traj = evolve(s0, cfg);
        benchmark::DoNotOptimize(traj);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Evolve)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
