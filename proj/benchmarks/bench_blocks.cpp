// Fast recursions against the Gram-matrix route, plus the exact tau residual.
#include "cbtau/bilinear.hpp"
#include "cbtau/painleve.hpp"
#include "cbtau/virasoro.hpp"

#include <benchmark/benchmark.h>

using namespace cbtau;

namespace {

void BM_FastC1Irregular(benchmark::State& state)
{
    FastParams fp;
    for (auto _ : state) benchmark::DoNotOptimize(fast_block(FastScheme::c1_irregular, fp, state.range(0)));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FastC1Irregular)->DenseRange(10, 50, 10)->Unit(benchmark::kMillisecond)->Complexity();

void BM_FastC1Regular(benchmark::State& state)
{
    FastParams fp;
    for (auto _ : state) benchmark::DoNotOptimize(fast_block(FastScheme::c1_regular, fp, state.range(0)));
}
BENCHMARK(BM_FastC1Regular)->DenseRange(4, 16, 4)->Unit(benchmark::kMillisecond);

void BM_FastGenericIrregular(benchmark::State& state)
{
    FastParams fp;
    for (auto _ : state) benchmark::DoNotOptimize(fast_block(FastScheme::generic_irregular, fp, state.range(0)));
}
BENCHMARK(BM_FastGenericIrregular)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_GramIrregular(benchmark::State& state)
{
    const Scalar s(rat(1, 5));
    for (auto _ : state)
        benchmark::DoNotOptimize(block_irregular_coeffs(VirParams{Scalar(1), s * s}, state.range(0)));
}
BENCHMARK(BM_GramIrregular)->DenseRange(2, 10, 2)->Unit(benchmark::kMillisecond);

void BM_TauResidualP3(benchmark::State& state)
{
    TauSpec spec;
    spec.n_max = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(tau_residual(spec));
}
BENCHMARK(BM_TauResidualP3)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
