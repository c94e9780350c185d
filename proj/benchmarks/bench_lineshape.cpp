#include <benchmark/benchmark.h>

#include "omckit/lineshape.hpp"
#include "omckit/special.hpp"

using namespace omckit;

static void FaddeevaRe(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    x += 0.37;
    if (x > 40.0) x -= 40.0;
    benchmark::DoNotOptimize(faddeeva_re(x, 0.21));
  }
}
BENCHMARK(FaddeevaRe);

static void VoigtPsd(benchmark::State& state) {
  const LineshapeParams p{5.0e7, 2.3e3, 6.1e3, 1.0, 0.0};
  double f = 5.0e7 - 2.0e4;
  for (auto _ : state) {
    f += 13.7;
    if (f > 5.0e7 + 2.0e4) f -= 4.0e4;
    benchmark::DoNotOptimize(voigt_psd(p, f));
  }
}
BENCHMARK(VoigtPsd);

static void VoigtSpectrum(benchmark::State& state) {
  const LineshapeParams p{5.0e7, 2.3e3, 6.1e3, 1.0, 1.0};
  const std::size_t n = state.range(0);
  std::vector<double> out(n);
  for (auto _ : state) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = voigt_psd(p, 5.0e7 - 2.0e4 + 4.0e4 * i / double(n - 1));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(VoigtSpectrum)->Range(256, 4096);

BENCHMARK_MAIN();
