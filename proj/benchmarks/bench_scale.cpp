#include <benchmark/benchmark.h>

#include "cbi/numerics/laplace_inversion.hpp"
#include "cbi/scale.hpp"

namespace {

void BM_BuildScaleBrownianNumeric(benchmark::State& state) {
    const cbi::BranchingMechanism br(0.5, -1.0);
    cbi::ScaleOptions o;
    o.force_numeric = true;
    o.nodes = std::size_t(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cbi::build_scale(br, o));
}
BENCHMARK(BM_BuildScaleBrownianNumeric)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_BuildScaleTemperedStable(benchmark::State& state) {
    const cbi::BranchingMechanism br(0.0, -2.0, cbi::LevyMeasure::tempered_stable(0.5, 1.5, 2.0));
    for (auto _ : state) benchmark::DoNotOptimize(cbi::build_scale(br));
}
BENCHMARK(BM_BuildScaleTemperedStable)->Unit(benchmark::kMillisecond);

void BM_StehfestSingle(benchmark::State& state) {
    const cbi::BranchingMechanism br(0.5, -1.0);
    const auto f = [&](double u) { return -1.0 / cbi::eval_R(br, u); };
    const int order = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cbi::inversion::stehfest(f, 1.0, order));
}
BENCHMARK(BM_StehfestSingle)->Arg(12)->Arg(16)->Arg(20);

void BM_ScaleEvaluate(benchmark::State& state) {
    const cbi::BranchingMechanism br(0.0, -1.0, cbi::LevyMeasure::exponential(1.0, 1.0));
    const auto sf = cbi::build_scale(br);
    double x = 0.001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sf(x));
        x = x > 19.0 ? 0.001 : x * 1.01;
    }
}
BENCHMARK(BM_ScaleEvaluate);

}  // namespace
