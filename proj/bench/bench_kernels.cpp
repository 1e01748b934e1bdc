// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include "grabforest/grab_sim.hpp"
#include "grabforest/gw_sampler.hpp"
#include "grabforest/replicas.hpp"

using namespace grabforest;

namespace {

const FloatLaw& aperiodic() {
  static const FloatLaw law = parse_float_law("0:0.35,1:0.30,2:0.35");
  return law;
}

const FloatLaw& subcritical() {
  static const FloatLaw law = parse_float_law("0:0.5,1:0.3,2:0.2");
  return law;
}

void BM_WalkPmfSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(walk_pmf_serial(aperiodic(), n, n));
}

void BM_WalkPmfParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(walk_pmf(aperiodic(), n, n));
}

// One replica: conditioned arms plus the dynamics in shape mode.
std::size_t replica(Rng& rng, const SumConditionedSampler& arms) {
  const ArmVector x(arms(rng));
  return simulate_shape(x, rng).tree_count();
}

void BM_ReplicasSerial(benchmark::State& state) {
  const SumConditionedSampler arms(subcritical(), 500, 0, 499);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_replicas_serial(
        256, {1, 1}, 0, [&](Rng& rng, std::size_t) { return replica(rng, arms); }));
  }
}

void BM_ReplicasParallel(benchmark::State& state) {
  const SumConditionedSampler arms(subcritical(), 500, 0, 499);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_replicas(256, {1, 0}, 0, [&](Rng& rng, std::size_t) { return replica(rng, arms); }));
  }
}

void BM_SimulateShape(benchmark::State& state) {
  Rng setup(5);
  const ArmVector arms =
      sample_conditioned_arms(subcritical(), static_cast<std::size_t>(state.range(0)), setup);
  Rng rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_shape(arms, rng));
}

void BM_SimulateTerminal(benchmark::State& state) {
  Rng setup(5);
  const ArmVector arms =
      sample_conditioned_arms(subcritical(), static_cast<std::size_t>(state.range(0)), setup);
  Rng rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_terminal(arms, rng));
}

}  // namespace

BENCHMARK(BM_WalkPmfSerial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WalkPmfParallel)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicasSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicasParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateShape)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateTerminal)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
