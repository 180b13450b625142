#include <benchmark/benchmark.h>

#include "optlim/pipeline.hpp"
#include "optlim/solver.hpp"

using namespace optlim;

static void BM_solve_h2(benchmark::State& state) {
  ComputeOptions co;
  co.knot = state.range(0) == 0 ? "4_1" : "5_2";
  auto po = build_objects(co);
  auto sys = system_from_potential(po.W);
  SolveOptions so;
  so.seeds = 200;
  so.rng_seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(sys, so));
  }
}
BENCHMARK(BM_solve_h2)->Arg(0)->Arg(1);

static void BM_full_pipeline_52(benchmark::State& state) {
  for (auto _ : state) {
    ComputeOptions co;
    co.knot = "5_2";
    benchmark::DoNotOptimize(run_compute(co));
  }
}
BENCHMARK(BM_full_pipeline_52);

static void BM_build_triangulations(benchmark::State& state) {
  ComputeOptions co;
  co.knot = "6_3";
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_objects(co));
  }
}
BENCHMARK(BM_build_triangulations);
