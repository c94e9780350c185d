#include <benchmark/benchmark.h>

#include "omckit/fits.hpp"
#include "omckit/noise.hpp"
#include "synth.hpp"

using namespace omckit;

static void LorentzianFit(benchmark::State& state) {
  const LineshapeParams truth{5.0e7, 400.0, 0.0, 5.0, 1e-4};
  const Spectrum spec = add_measurement_noise(
      synth::voigt_spectrum(truth, state.range(0), 2.0e4), 7, 200);
  LineshapeFitOptions opts;
  opts.n_avg = 200;
  for (auto _ : state) benchmark::DoNotOptimize(fit_lorentzian(spec, opts));
}
BENCHMARK(LorentzianFit)->Arg(512)->Arg(2048);

static void VoigtFit(benchmark::State& state) {
  const LineshapeParams truth{5.0e7, 2.3e3, 6.1e3, 4.0, 1e-4};
  const Spectrum spec = add_measurement_noise(
      synth::voigt_spectrum(truth, 1024, 4.0e5), 9, 400);
  LineshapeFitOptions opts;
  opts.n_avg = 400;
  for (auto _ : state) benchmark::DoNotOptimize(fit_voigt(spec, opts));
}
BENCHMARK(VoigtFit);

static void BathModelJointFit(benchmark::State& state) {
  const auto pts = synth::cooling_curves(0.05, 41);
  BathFitOptions opts;
  opts.profile_gamma_0 = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_bath_model(
        pts, testutil::device(), 13.300924322380075, 0.25, opts));
}
BENCHMARK(BathModelJointFit)->Arg(0)->Arg(1);
