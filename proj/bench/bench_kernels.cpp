// Serial reference vs OpenMP for the two parallel paths: dense balance sweeps
// and optimizer restarts. Arg(0) = serial, Arg(1) = parallel.

#include "ibmag/fixtures.hpp"
#include "ibmag/magnetic_spring.hpp"
#include "ibmag/spring_synthesis.hpp"
#include "ibmag/unit_sim.hpp"

#include <benchmark/benchmark.h>

using namespace ibmag;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

const Fixture& large() {
    static Fixture const fx = load_fixture("prototype_large");
    return fx;
}

void BM_DeviationProfile(benchmark::State& state) {
    auto const& pair = large().unit.pair;
    for (auto _ : state) benchmark::DoNotOptimize(deviation_profile(pair, 1'000'001, exec_of(state)));
    state.SetLabel(exec_of(state) == Exec::serial ? "serial" : "omp");
}
BENCHMARK(BM_DeviationProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PullSweep(benchmark::State& state) {
    auto const& unit = large().unit;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_pull(unit, PullMode::rod, 40.0, 1e-4, exec_of(state)));
    state.SetLabel(exec_of(state) == Exec::serial ? "serial" : "omp");
}
BENCHMARK(BM_PullSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OptimizerRestarts(benchmark::State& state) {
    Sample const pts[] = {{0.0, 8.4}, {7.5, 0.5}};
    ForceCurve const curve = fit_power_law(pts, 2.0);
    OptimizeOptions opt;
    opt.starts = 16;
    opt.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(optimize_tangent_points(curve, 6, 7.5, 1, opt));
    state.SetLabel(opt.exec == Exec::serial ? "serial" : "omp");
}
BENCHMARK(BM_OptimizerRestarts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
