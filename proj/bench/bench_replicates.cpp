// Serial reference against the OpenMP replicate kernel. Both paths produce
// bit-identical moments; only wall time differs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "polartail/angular.hpp"
#include "polartail/baselines.hpp"
#include "polartail/estimator.hpp"
#include "polartail/radial.hpp"
#include "polartail/replicate.hpp"

namespace polartail {
namespace {

ProblemSpec lognormals(int d) {
  std::vector<Marginal> m;
  for (int i = 1; i <= d; ++i) m.push_back(Marginal::lognormal(-static_cast<double>(i) / d, std::sqrt(static_cast<double>(i) / d)));
  return ProblemSpec::independent(std::move(m));
}

// A cheap synthetic replicate isolates the kernel's partition and merge cost.
void BM_KernelSerial(benchmark::State& state) {
  const auto R = static_cast<std::size_t>(state.range(0));
  const ReplicateFactory factory = [] { return [](Rng& rng) { return standard_exponential(rng); }; };
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates_serial(R, 1, kDefaultWorkers, factory).total());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(R));
}

void BM_KernelParallel(benchmark::State& state) {
  const auto R = static_cast<std::size_t>(state.range(0));
  const ReplicateFactory factory = [] { return [](Rng& rng) { return standard_exponential(rng); }; };
  for (auto _ : state) benchmark::DoNotOptimize(run_replicates_parallel(R, 1, kDefaultWorkers, factory).total());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(R));
}

void polar_bench(benchmark::State& state, bool parallel) {
  const ProblemSpec spec = lognormals(12);
  const RadialModel rm = RadialModel::subexp_dominant(spec, {11});
  const AngularModel am = AngularModel::optimistic_for(spec);
  const auto R = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(polar_is_estimate(spec, rm, am, 60.0, R, 7, Execution{kDefaultWorkers, parallel}).estimate);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(R));
}

void BM_PolarSerial(benchmark::State& state) { polar_bench(state, false); }
void BM_PolarParallel(benchmark::State& state) { polar_bench(state, true); }

void ak_bench(benchmark::State& state, bool parallel) {
  const ProblemSpec spec = lognormals(12);
  const auto R = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ak_estimate(spec, 60.0, R, 7, Execution{kDefaultWorkers, parallel}).estimate);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(R));
}

void BM_AkSerial(benchmark::State& state) { ak_bench(state, false); }
void BM_AkParallel(benchmark::State& state) { ak_bench(state, true); }

BENCHMARK(BM_KernelSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PolarSerial)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PolarParallel)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AkSerial)->Arg(1 << 17)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AkParallel)->Arg(1 << 17)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
}  // namespace polartail

BENCHMARK_MAIN();
