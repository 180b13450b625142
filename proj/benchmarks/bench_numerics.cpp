#include <benchmark/benchmark.h>

#include "optlim/numerics.hpp"
#include "optlim/rng.hpp"

using namespace optlim;

static void BM_dilog(benchmark::State& state) {
  Rng rng(1);
  std::vector<Cx> pts;
  for (int i = 0; i < 1024; ++i) pts.push_back(rng.annulus(0.05, 3.0));
  size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dilog(pts[k++ & 1023]));
  }
}
BENCHMARK(BM_dilog);

static void BM_bloch_wigner(benchmark::State& state) {
  Rng rng(2);
  std::vector<Cx> pts;
  for (int i = 0; i < 1024; ++i) pts.push_back(rng.annulus(0.05, 3.0));
  size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bloch_wigner(pts[k++ & 1023]));
  }
}
BENCHMARK(BM_bloch_wigner);
