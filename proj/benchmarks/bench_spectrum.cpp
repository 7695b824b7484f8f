#include <benchmark/benchmark.h>

#include "fluorospec/bloch.hpp"
#include "fluorospec/dressed.hpp"
#include "fluorospec/features.hpp"
#include "fluorospec/grid.hpp"
#include "fluorospec/spectrum.hpp"
#include "fluorospec/stochastic.hpp"

namespace {

using namespace fluorospec;

const DriveParams kHole{1.0, 50.0, 0.0, 100.0};

void BM_SpectrumExact(benchmark::State& state) {
    const auto omegas = default_grid(kHole, static_cast<std::size_t>(state.range(0))).values();
    for (auto _ : state) benchmark::DoNotOptimize(spectrum_exact(kHole, omegas));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpectrumExact)->Arg(2001)->Arg(20001);

void BM_SpectrumResolvent(benchmark::State& state) {
    const auto omegas = default_grid(kHole, static_cast<std::size_t>(state.range(0))).values();
    for (auto _ : state) benchmark::DoNotOptimize(spectrum_resolvent(kHole, omegas));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpectrumResolvent)->Arg(2001)->Arg(20001);

void BM_DressedTotal(benchmark::State& state) {
    const auto omegas = default_grid(kHole).values();
    for (auto _ : state) benchmark::DoNotOptimize(dressed_total(kHole, omegas));
}
BENCHMARK(BM_DressedTotal);

void BM_CorrelationAndTransform(benchmark::State& state) {
    const auto omegas = default_grid(kHole).values();
    const auto window = default_correlation_window(kHole);
    for (auto _ : state) {
        const auto trace = correlation(kHole, window.tau_max, window.dtau);
        benchmark::DoNotOptimize(spectrum_from_correlation(trace, omegas));
    }
}
BENCHMARK(BM_CorrelationAndTransform)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state) {
    const auto s = spectrum_exact(kHole, default_grid(kHole).values());
    for (auto _ : state) benchmark::DoNotOptimize(analyze(s, kHole));
}
BENCHMARK(BM_Analyze);

void BM_McSpectrumSmall(benchmark::State& state) {
    const DriveParams& p = kHole;
    const auto omegas = default_grid(p, 201).values();
    McSpectrumOptions opt;
    opt.realizations = static_cast<std::size_t>(state.range(0));
    opt.t_relax = 0.3;
    opt.tau_max = 0.3;
    for (auto _ : state) benchmark::DoNotOptimize(mc_steady_spectrum(p, omegas, opt));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McSpectrumSmall)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_McTrajectory(benchmark::State& state) {
    const DriveParams p{1.0, 50.0, 0.0, 50.0};
    McTrajectoryOptions opt;
    opt.realizations = static_cast<std::size_t>(state.range(0));
    opt.t_end = 0.5;
    for (auto _ : state) benchmark::DoNotOptimize(mc_average_trajectory(p, opt));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McTrajectory)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
