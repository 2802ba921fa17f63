#include <benchmark/benchmark.h>

#include "commsim/engine.hpp"
#include "commsim/harness.hpp"

namespace {

using namespace commsim;

SimParams square(int side) {
  SimParams p;
  p.grid_w = p.grid_h = side;
  return p;
}

void BM_Step(benchmark::State& state) {
  Simulation sim(square(static_cast<int>(state.range(0))));
  for (int i = 0; i < 500; ++i) sim.advance();  // past the initial transient
  for (auto _ : state) benchmark::DoNotOptimize(sim.advance());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step)->Arg(15)->Arg(25)->Arg(50);

void BM_FullRun(benchmark::State& state) {
  auto p = square(15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(p).summary);
    ++p.seed;
  }
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond);

void BM_CheckInvariants(benchmark::State& state) {
  Simulation sim(square(25));
  for (int i = 0; i < 500; ++i) sim.advance();
  for (auto _ : state) benchmark::DoNotOptimize(check_invariants(sim.community(), sim.params()));
}
BENCHMARK(BM_CheckInvariants);

void BM_Sweep(benchmark::State& state) {
  auto base = square(15);
  base.steps = 2000;
  SweepSpec spec;
  spec.values = {0.10, 0.15, 0.25, 0.60};
  spec.seeds = {1, 2, 3, 4};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sweep(base, spec, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
