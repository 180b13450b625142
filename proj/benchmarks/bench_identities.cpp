#include <benchmark/benchmark.h>

#include "optlim/identities.hpp"

using namespace optlim;

static void BM_lemma5_sample_and_check(benchmark::State& state) {
  Rng rng(3);
  for (auto _ : state) {
    auto s = sample_octahedron(rng);
    double worst = 0;
    for (int w = 22; w <= 25; ++w) worst = std::max(worst, check_lemma5(s, w));
    benchmark::DoNotOptimize(worst);
  }
}
BENCHMARK(BM_lemma5_sample_and_check);

static void BM_lemma31_derivatives(benchmark::State& state) {
  Rng rng(4);
  for (auto _ : state) {
    auto w = sample_crossing_regions(rng);
    benchmark::DoNotOptimize(check_lemma31_derivatives(w));
  }
}
BENCHMARK(BM_lemma31_derivatives);
