#include "vlp/modular.hpp"
#include "vlp/norm.hpp"
#include "vlp/space.hpp"

#include <benchmark/benchmark.h>

using namespace vlp;

namespace {

void BM_ModularLogConstant(benchmark::State& state)
{
    const auto p = Exponent::log_family();
    const auto f = Func::constant(0.9);
    QuadConfig cfg;
    cfg.closed_forms = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(modular(f, p, cfg).value);
}
BENCHMARK(BM_ModularLogConstant)->Arg(1)->Arg(0);

void BM_ModularSpikedContinuous(benchmark::State& state)
{
    const auto p = Exponent::spiked(static_cast<int>(state.range(0)), 4, 2);
    Rng rng(1);
    const auto f = random_continuous(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(modular(f, p).value);
}
BENCHMARK(BM_ModularSpikedContinuous)->Arg(4)->Arg(8)->Arg(10);

void BM_LuxemburgNorm(benchmark::State& state)
{
    const auto p = state.range(0) == 0 ? Exponent::log_family() : Exponent::spiked(10, 4, 2);
    Rng rng(2);
    const auto f = random_continuous(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(luxemburg_norm(f, p).value);
}
BENCHMARK(BM_LuxemburgNorm)->Arg(0)->Arg(1);

void BM_DistanceTrace(benchmark::State& state)
{
    const auto p = Exponent::log_family();
    const auto one = Func::constant(1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(distance_to_E(one, p).limit_estimate);
}
BENCHMARK(BM_DistanceTrace)->Unit(benchmark::kMillisecond);

void BM_OrliczNorm(benchmark::State& state)
{
    const auto p = Exponent::spiked(10, 4, 2);
    Rng rng(3);
    const auto v = random_continuous(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(orlicz_norm(v, p).value);
}
BENCHMARK(BM_OrliczNorm)->Unit(benchmark::kMillisecond);

void BM_Closedness(benchmark::State& state)
{
    const auto p = Exponent::spiked(10, 4, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(closedness_constants(p, static_cast<int>(state.range(0)), 8).c_est);
}
BENCHMARK(BM_Closedness)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
