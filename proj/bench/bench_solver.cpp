// Serial against OpenMP solve, plus the two overlap kernels.
//   ./bench_solver --benchmark_filter=Solve

#include <benchmark/benchmark.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "twtsched/optimizer.hpp"
#include "twtsched/overlap.hpp"

namespace {

void BM_SolveSerial(benchmark::State& state) {
  const auto spec = fixture::deployment_instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(twt::solve(spec, {1, false}).objective);
}

void BM_SolveParallel(benchmark::State& state) {
  const auto spec = fixture::deployment_instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(twt::solve(spec, {0, false}).objective);
}

void BM_SolveCoarseToFine(benchmark::State& state) {
  const auto spec = fixture::deployment_instance(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(twt::solve(spec, {0, true}).objective);
}

std::vector<twt::ScheduledClient> bench_set(int n) {
  std::mt19937_64 rng(3);
  auto cs = oracle::random_schedule_set(rng, n);
  std::sort(cs.begin(), cs.end(), [](const auto& a, const auto& b) {
    return twt::takes_precedence(a.mcs, a.id, b.mcs, b.id);
  });
  return cs;
}

void BM_OverlapSweep(benchmark::State& state) {
  const auto cs = bench_set(static_cast<int>(state.range(0)));
  std::map<twt::ClientId, double> rates;
  for (const auto& c : cs) rates[c.id] = 10.0;
  for (auto _ : state) {
    const auto iv = twt::expand_intervals(cs);
    benchmark::DoNotOptimize(twt::overlap_loss(iv, rates).idle_us);
  }
}

void BM_PeriodicKernel(benchmark::State& state) {
  const auto cs = bench_set(static_cast<int>(state.range(0)));
  std::vector<twt::detail::PeriodicClient> pc;
  for (const auto& c : cs) pc.push_back({c.schedule.offset_us, c.schedule.waketime_us, c.schedule.cycle_us()});
  std::vector<std::int64_t> wake(cs.size()), lost(cs.size());
  for (auto _ : state) {
    twt::detail::periodic_losses(pc, twt::kHorizonUs, twt::HorizonPolicy::truncate, wake, lost);
    benchmark::DoNotOptimize(lost.data());
  }
}

}  // namespace

BENCHMARK(BM_SolveSerial)->Arg(4000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveParallel)->Arg(4000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveCoarseToFine)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OverlapSweep)->Arg(2)->Arg(6);
BENCHMARK(BM_PeriodicKernel)->Arg(2)->Arg(6);

BENCHMARK_MAIN();
