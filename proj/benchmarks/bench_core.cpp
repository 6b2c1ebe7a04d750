#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "svycal/calibrate.hpp"
#include "svycal/design.hpp"
#include "svycal/experiment.hpp"
#include "svycal/rng.hpp"

namespace {

svycal::FinitePopulation synthetic_population(std::size_t n) {
  svycal::CounterRng rng(42);
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [g, h] = rng.next_normal_pair();
    x[i] = 20.0 + 5.0 * h;
    y[i] = 12.0 + 1.4 * x[i] + 3.0 * g;
  }
  return svycal::FinitePopulation(std::move(y), std::move(x));
}

void BM_EnumerateSubsets(benchmark::State& state) {
  const std::size_t N = static_cast<std::size_t>(state.range(0));
  const std::size_t n = static_cast<std::size_t>(state.range(1));
  std::uint64_t sink = 0;
  for (auto _ : state) {
    const auto summary = svycal::enumerate_combinations(
        N, n, [&](std::span<const std::size_t> subset) { sink += subset[0]; });
    benchmark::DoNotOptimize(summary.visited);
  }
  benchmark::DoNotOptimize(sink);
}
BENCHMARK(BM_EnumerateSubsets)->Args({20, 5})->Args({24, 8});

void BM_LrWeights(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto pop = synthetic_population(n * 4);
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i * 2;
  const auto sample =
      svycal::make_srswor_sample(pop, svycal::SrsworDesign(pop.size(), n), indices);
  const auto spec = svycal::CalibrationSpec::with_weight_sum(pop.total_x() * 0.25);
  for (auto _ : state) {
    const auto w = svycal::lr_weights(sample, spec);
    benchmark::DoNotOptimize(w.w.data());
  }
}
BENCHMARK(BM_LrWeights)->Arg(100)->Arg(1000);

void BM_MonteCarloCell(benchmark::State& state) {
  svycal::MonteCarloConfig cfg;
  cfg.rho = 0.5;
  cfg.n = static_cast<int>(state.range(0));
  cfg.replicates = 2000;
  cfg.seed = 7;
  for (auto _ : state) {
    const auto report = svycal::monte_carlo_re(cfg);
    benchmark::DoNotOptimize(report.re_percent);
  }
}
BENCHMARK(BM_MonteCarloCell)->Arg(25)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
