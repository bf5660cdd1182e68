#include <benchmark/benchmark.h>

#include "cbi/limit_law.hpp"

namespace {

const cbi::ImmigrationMechanism kExpImm(0.0, cbi::LevyMeasure::exponential(1.0, 1.0));
const cbi::BranchingMechanism kBrownian(0.5, -1.0);

void BM_BuildLimitLawClosedForm(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(cbi::build_limit_law(kExpImm, kBrownian));
}
BENCHMARK(BM_BuildLimitLawClosedForm)->Unit(benchmark::kMillisecond);

void BM_BuildLimitLawNumeric(benchmark::State& state) {
    cbi::LimitOptions o;
    o.scale.force_numeric = true;
    for (auto _ : state) benchmark::DoNotOptimize(cbi::build_limit_law(kExpImm, kBrownian, o));
}
BENCHMARK(BM_BuildLimitLawNumeric)->Unit(benchmark::kMillisecond);

void BM_KTriplet(benchmark::State& state) {
    const auto law = cbi::build_limit_law(kExpImm, kBrownian);
    double x = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(law.k(x));
        x = x > 5.0 ? 0.05 : x * 1.1;
    }
}
BENCHMARK(BM_KTriplet)->Unit(benchmark::kMicrosecond);

void BM_KExcursion(benchmark::State& state) {
    const auto law = cbi::build_limit_law(kExpImm, kBrownian);
    double x = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(law.k_excursion(x));
        x = x > 5.0 ? 0.05 : x * 1.1;
    }
}
BENCHMARK(BM_KExcursion)->Unit(benchmark::kMicrosecond);

void BM_LaplaceExponent(benchmark::State& state) {
    const cbi::ImmigrationMechanism imm(0.5, cbi::LevyMeasure::tempered_stable(1.0, 0.5, 1.0));
    const cbi::BranchingMechanism br(0.0, -2.0, cbi::LevyMeasure::tempered_stable(0.5, 1.5, 2.0));
    for (auto _ : state) benchmark::DoNotOptimize(cbi::laplace_exponent(imm, br, 3.0));
}
BENCHMARK(BM_LaplaceExponent)->Unit(benchmark::kMicrosecond);

void BM_FellerDensity(benchmark::State& state) {
    const auto law = cbi::build_limit_law(cbi::ImmigrationMechanism(1.0), kBrownian);
    const std::vector<double> xs{0.25, 0.5, 1.0, 2.0, 4.0};
    for (auto _ : state) benchmark::DoNotOptimize(cbi::density(law, xs));
}
BENCHMARK(BM_FellerDensity)->Unit(benchmark::kMillisecond);

}  // namespace
