#include <benchmark/benchmark.h>

#include "symtest/samplers.hpp"
#include "symtest/spherical_test.hpp"
#include "symtest/statistic.hpp"

namespace {

using namespace symtest;

SampleMatrix gaussian(std::size_t n, std::size_t d) {
  DistributionSpec spec;
  spec.dim = d;
  RngStream rng(42, {0, 0, Purpose::Data});
  return sample_distribution(spec, n, rng);
}

// Args: n, d, Nu, Nc.
void BM_Brute(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const SampleMatrix x = gaussian(n, d);
  const DirectionGrid g = make_grid(d, state.range(2), state.range(3), 10.0, 1, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(ks_statistic_brute(x, g));
}

void BM_FastSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const SampleMatrix x = gaussian(n, d);
  const DirectionGrid g = make_grid(d, state.range(2), state.range(3), 10.0, 1, 0, 0);
  StatisticOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ks_statistic(x, g, opts));
}

void BM_FastParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const SampleMatrix x = gaussian(n, d);
  const DirectionGrid g = make_grid(d, state.range(2), state.range(3), 10.0, 1, 0, 0);
  StatisticOptions opts;
  opts.threads = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ks_statistic(x, g, opts));
}

void BM_MakeGrid(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::uint64_t b = 0;
  for (auto _ : state) benchmark::DoNotOptimize(make_grid(d, 1000, 500, 10.0, 1, 0, ++b));
}

void BM_SphericalTest(benchmark::State& state) {
  const SampleMatrix x = gaussian(100, static_cast<std::size_t>(state.range(0)));
  BootstrapConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(test_spherical(x, cfg));
}

}  // namespace

BENCHMARK(BM_Brute)->Args({100, 3, 50, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FastSerial)
    ->Args({100, 3, 50, 100})
    ->Args({100, 3, 1000, 500})
    ->Args({100, 6, 1000, 500})
    ->Args({200, 10, 1000, 500})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FastParallel)->Args({100, 3, 1000, 500})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MakeGrid)->Arg(3)->Arg(6)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SphericalTest)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
