#include <benchmark/benchmark.h>

#include "cbi/riccati.hpp"
#include "cbi/simulate.hpp"

namespace {

void BM_RiccatiFeller(benchmark::State& state) {
    const cbi::ImmigrationMechanism imm(1.0);
    const cbi::BranchingMechanism br(0.5, -1.0);
    const double t = double(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(cbi::solve_riccati(imm, br, t, 1.0));
}
BENCHMARK(BM_RiccatiFeller)->Arg(1)->Arg(20)->Arg(1000);

void BM_RiccatiTemperedStable(benchmark::State& state) {
    const cbi::ImmigrationMechanism imm(0.5, cbi::LevyMeasure::tempered_stable(1.0, 0.5, 1.0));
    const cbi::BranchingMechanism br(0.0, -2.0, cbi::LevyMeasure::tempered_stable(0.5, 1.5, 2.0));
    for (auto _ : state) benchmark::DoNotOptimize(cbi::solve_riccati(imm, br, 5.0, 1.0));
}
BENCHMARK(BM_RiccatiTemperedStable)->Unit(benchmark::kMicrosecond);

void BM_SimulateFeller(benchmark::State& state) {
    cbi::SimConfig c{cbi::ImmigrationMechanism(1.0), cbi::BranchingMechanism(0.5, -1.0)};
    c.paths = std::uint64_t(state.range(0));
    c.horizon = 5.0;
    c.parallel = false;
    for (auto _ : state) benchmark::DoNotOptimize(cbi::simulate(c));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateFeller)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
