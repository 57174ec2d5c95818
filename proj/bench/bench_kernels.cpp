// Serial reference vs OpenMP kernels: raw grid quadrature on 1-3 D
// boxes, and a full set-integral KLD on the bundled example.

#include <benchmark/benchmark.h>

#include <cmath>

#include "lmoapprox/approx.hpp"
#include "lmoapprox/divergence.hpp"
#include "lmoapprox/quadrature.hpp"
#include "lmoapprox/spec_io.hpp"

using namespace lmoapprox;

namespace {

double integrand(std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return std::exp(-0.5 * s) * (1.0 + 0.1 * std::cos(x[0]));
}

QuadratureGrid grid_for(std::int64_t dim) {
    return QuadratureGrid::uniform(static_cast<std::size_t>(dim), -8.0, 8.0, dim == 3 ? 121 : dim == 2 ? 1001 : 200001);
}

void BM_GridSerial(benchmark::State& state) {
    const auto grid = grid_for(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(integrate_on_grid_serial(integrand, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.node_count()));
}

void BM_GridParallel(benchmark::State& state) {
    const auto grid = grid_for(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(integrate_on_grid(integrand, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.node_count()));
}

void BM_RefinedSerial(benchmark::State& state) {
    const auto grid = grid_for(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(integrate_refined_serial(integrand, grid));
}

void BM_RefinedParallel(benchmark::State& state) {
    const auto grid = grid_for(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(integrate_refined(integrand, grid));
}

// state.range(0) = worker threads (1 = effectively serial).
void BM_ExampleKldLmb(benchmark::State& state) {
    const LMODensity pi(decode_spec(paper_example()).params);
    const auto lmb = approx_lmb(pi);
    const int saved = worker_threads();
    set_worker_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kld(pi, lmb).value);
    set_worker_threads(saved);
}

}  // namespace

BENCHMARK(BM_GridSerial)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RefinedSerial)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RefinedParallel)->DenseRange(1, 3)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExampleKldLmb)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
