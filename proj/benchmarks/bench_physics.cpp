#include <benchmark/benchmark.h>

#include "omckit/bath.hpp"
#include "omckit/physics.hpp"

using namespace omckit;

namespace {
DeviceParams device() { return {735e3, 529e6, 153e6, 376e6, 3.6e9, 1545e-9}; }

BathModel bath() {
  BathModel b;
  b.gamma_0_hz = 306.0;
  b.t_f_k = 0.01;
  b.np_amplitude = 13.3;
  b.np_exponent = 0.25;
  b.gamma_p_law = GammaPLaw::activated(790.0, 2.0);
  return b;
}
}  // namespace

static void ModeOccupancy(benchmark::State& state) {
  const DeviceParams dev = device();
  const BathModel b = bath();
  double n_c = 0.01;
  for (auto _ : state) {
    n_c *= 1.07;
    if (n_c > 100.0) n_c = 0.01;
    benchmark::DoNotOptimize(mode_occupancy(dev, {dev.omega_m_hz, n_c}, b));
  }
}
BENCHMARK(ModeOccupancy);

static void BosonMixingIntegral(benchmark::State& state) {
  double x_c = 0.0;
  for (auto _ : state) {
    x_c += 0.173;
    if (x_c > 30.0) x_c = 0.0;
    benchmark::DoNotOptimize(boson_mixing_integral(3.0, x_c));
  }
}
BENCHMARK(BosonMixingIntegral);

static void ToyEffectiveBath(benchmark::State& state) {
  ToyThreePhonon m;
  m.omega_1_hz = 100e9;
  m.omega_m_hz = 3.6e9;
  m.omega_2_hz = m.omega_1_hz - m.omega_m_hz;
  m.coupling_hz = 1.0;
  m.t_p_k = 1.0;
  for (auto _ : state) {
    m.t_p_k = m.t_p_k > 8.0 ? 0.1 : m.t_p_k * 1.1;
    benchmark::DoNotOptimize(toy_effective_bath(m));
  }
}
BENCHMARK(ToyEffectiveBath);
