#include <doctest.h>

#include <cmath>

#include "omckit/constants.hpp"
#include "omckit/errors.hpp"
#include "omckit/physics.hpp"
#include "testutil.hpp"

using namespace omckit;

TEST_SUITE_BEGIN("physics");

TEST_CASE("device validation") {
  DeviceParams dev = testutil::device();
  CHECK_NOTHROW(dev.validate());
  CHECK(dev.sideband_resolved());
  dev.kappa_e_hz = 200e6;  // breaks kappa = kappa_e + kappa_i
  CHECK_THROWS_AS(dev.validate(), DomainError);
  dev = testutil::device();
  dev.g0_hz = 0.0;
  CHECK_THROWS_AS(dev.validate(), DomainError);
}

TEST_CASE("bose_einstein values") {
  CHECK(bose_einstein(3.6e9, 0.0) == 0.0);
  CHECK(bose_einstein(3.6e9, 4.0) ==
        doctest::Approx(22.6554).epsilon(5e-4));
  // inverse of <n> = 0.98 lands near 246 mK; forward at 245.6 mK gives 0.98
  CHECK(bose_einstein(3.6e9, 0.2456) == doctest::Approx(0.98).epsilon(0.01));
  CHECK_THROWS_AS(bose_einstein(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(bose_einstein(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(bose_einstein(3.6e9, -0.1), DomainError);
}

TEST_CASE("bose_einstein stays stable for tiny quanta") {
  // h f / k T ~ 1.6e-13: occupancy ~ 1/x, the expm1 evaluation must not lose
  // it to cancellation
  const double f = 1.0, t = 300.0;
  const double x = constants::quantum_temperature_k(f) / t;
  const double n = bose_einstein(f, t);
  CHECK(n * x == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("inverse_bose_einstein") {
  CHECK(inverse_bose_einstein(3.6e9, 22.655398346) ==
        doctest::Approx(4.0).epsilon(1e-6));
  CHECK(inverse_bose_einstein(3.6e9, 1.0) ==
        doctest::Approx(0.24925839055).epsilon(1e-9));
  CHECK(inverse_bose_einstein(3.6e9, 0.98) ==
        doctest::Approx(0.245660).epsilon(1e-4));
  // n -> 0+ gives T -> 0+
  CHECK(inverse_bose_einstein(3.6e9, 1e-12) < 7e-3);
  CHECK(inverse_bose_einstein(3.6e9, 1e-12) > 0.0);
  CHECK_THROWS_AS(inverse_bose_einstein(3.6e9, 0.0), DomainError);
  CHECK_THROWS_AS(inverse_bose_einstein(3.6e9, -1.0), DomainError);
}

TEST_CASE("bose_einstein round-trip property") {
  testutil::TestRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double n = std::exp(rng.uniform(std::log(1e-6), std::log(1e6)));
    const double f = rng.uniform(1e6, 1e12);
    const double t = inverse_bose_einstein(f, n);
    CHECK(bose_einstein(f, t) == doctest::Approx(n).epsilon(1e-10));
  }
}

TEST_CASE("gamma_om reference value") {
  const DeviceParams dev = testutil::device();
  const double got = gamma_om(dev, {dev.omega_m_hz, 1.0});
  // two-Lorentzian arithmetic, written out independently
  const double hk2 = 0.25 * 529e6 * 529e6;
  const double expected =
      735e3 * 735e3 * 529e6 * (1.0 / hk2 - 1.0 / (7.2e9 * 7.2e9 + hk2));
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  CHECK(got == doctest::Approx(4079.37184359).epsilon(1e-9));
  // within the sideband-resolved correction of 4 g0^2/kappa
  CHECK(got == doctest::Approx(gamma_om_resolved(dev, 1.0)).epsilon(0.02));
}

TEST_CASE("gamma_om trivial zeros and oddness") {
  const DeviceParams dev = testutil::device();
  CHECK(gamma_om(dev, {0.0, 3.0}) == 0.0);
  CHECK(gamma_om(dev, {dev.omega_m_hz, 0.0}) == 0.0);
  testutil::TestRng rng(12);
  for (int i = 0; i < 200; ++i) {
    DeviceParams d = dev;
    d.omega_m_hz = rng.uniform(1e8, 1e10);
    d.kappa_hz = rng.uniform(1e7, 5e9);
    d.kappa_e_hz = 0.3 * d.kappa_hz;
    d.kappa_i_hz = 0.7 * d.kappa_hz;
    const double delta = rng.uniform(-3e10, 3e10);
    const double nc = rng.uniform(0.0, 100.0);
    const double plus = gamma_om(d, {delta, nc});
    const double minus = gamma_om(d, {-delta, nc});
    if (plus != 0.0)
      CHECK(std::fabs(plus + minus) <= 1e-12 * std::fabs(plus));
  }
}

TEST_CASE("mode_occupancy single-bath equilibrium") {
  const DeviceParams dev = testutil::device();
  BathModel b;
  b.gamma_0_hz = 306.0;
  b.t_f_k = 4.0;
  b.np_amplitude = 1.0;  // exponent 0.25, n_c = 0 -> n_p = 0, gamma_p = 0
  const double n_f = bose_einstein(dev.omega_m_hz, 4.0);
  CHECK(mode_occupancy(dev, {dev.omega_m_hz, 0.0}, b) ==
        doctest::Approx(n_f).epsilon(1e-14));
}

TEST_CASE("mode_occupancy reference operating point") {
  // gamma_i = gamma_0 + gamma_p = 400 Hz and <n> = 0.98 at n_c = 0.021
  const DeviceParams dev = testutil::device();
  const BathModel b = testutil::bath(0.010);
  const OccupancyDetail d = mode_occupancy_detail(dev, {dev.omega_m_hz, 0.021}, b);
  CHECK(d.n_f == doctest::Approx(3.137e-8).epsilon(1e-3));
  CHECK(b.gamma_0_hz + d.gamma_p_hz == doctest::Approx(400.0).epsilon(2e-3));
  CHECK(d.gamma_om_hz == doctest::Approx(85.667).epsilon(1e-3));
  CHECK(d.occupancy == doctest::Approx(0.98).epsilon(1e-3));
}

TEST_CASE("mode_occupancy cooling limit and instability") {
  const DeviceParams dev = testutil::device();
  const BathModel b = testutil::bath(0.010);
  CHECK(mode_occupancy(dev, {dev.omega_m_hz, 1e9}, b) < 1e-3);
  CHECK_THROWS_AS(mode_occupancy(dev, {-dev.omega_m_hz, 50.0}, b),
                  InstabilityError);
}

namespace {
// n_c-independent frozen bath for the algebraic self-consistency checks
BathModel frozen_bath(double gamma_0, double t_f, double n_p_const,
                      double gamma_p_const) {
  BathModel b;
  b.gamma_0_hz = gamma_0;
  b.t_f_k = t_f;
  b.np_amplitude = n_p_const;
  b.np_exponent = 0.0;
  if (gamma_p_const > 0.0)
    b.gamma_p_law = GammaPLaw::tabulated({1e-3, 1.0, 1e3},
                                         {gamma_p_const, gamma_p_const,
                                          gamma_p_const});
  return b;
}
}  // namespace

TEST_CASE("mode_occupancy invariants") {
  const DeviceParams dev = testutil::device();
  testutil::TestRng rng(13);
  for (int i = 0; i < 200; ++i) {
    const BathModel b =
        frozen_bath(rng.uniform(10.0, 1e3), rng.uniform(0.01, 4.0),
                    rng.uniform(0.01, 50.0), rng.uniform(1.0, 1e3));
    const double n_f = bose_einstein(dev.omega_m_hz, b.t_f_k);
    const double n_p = b.np_amplitude;
    const double n_c = rng.uniform(0.0, 20.0);
    const double occ = mode_occupancy(dev, {dev.omega_m_hz, n_c}, b);
    CHECK(occ <= std::max(n_f, n_p) * (1.0 + 1e-12));

    // n_c -> 0: weighted bath mean
    const double occ0 = mode_occupancy(dev, {dev.omega_m_hz, 0.0}, b);
    const double gp = b.gamma_p_law(1.0);
    const double mean =
        (b.gamma_0_hz * n_f + gp * n_p) / (b.gamma_0_hz + gp);
    CHECK(occ0 == doctest::Approx(mean).epsilon(1e-12));

    // monotone decreasing in gamma_om
    const double occ_more = mode_occupancy(dev, {dev.omega_m_hz, n_c + 1.0}, b);
    CHECK(occ_more <= occ * (1.0 + 1e-12));

    // <n>(n_c) = <n>(0) / (1 + C) on a frozen bath
    if (n_c > 0.0) {
      const double c = gamma_om(dev, {dev.omega_m_hz, n_c}) /
                       (b.gamma_0_hz + gp);
      CHECK(occ == doctest::Approx(occ0 / (1.0 + c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gamma_p laws are non-negative over all temperatures") {
  const GammaPLaw activated = GammaPLaw::activated(790.0, 2.0);
  const GammaPLaw table =
      GammaPLaw::tabulated({0.1, 1.0, 3.0, 10.0}, {1e-3, 100.0, 50.0, 2e4});
  testutil::TestRng rng(99);
  for (int i = 0; i < 300; ++i) {
    const double t = std::exp(rng.uniform(std::log(1e-4), std::log(1e3)));
    CHECK(activated(t) >= 0.0);
    CHECK(table(t) >= 0.0);
  }
  CHECK(activated(0.0) == 0.0);
  CHECK(table(0.0) == 0.0);
  CHECK_THROWS_AS(activated(-1.0), DomainError);
}

TEST_CASE("sideband asymmetry weak-probe thermometer limit") {
  const DeviceParams dev = testutil::device();
  const BathModel b = frozen_bath(306.0, 4.0, 0.0, 0.0);
  // gamma_om / gamma_i < 1e-6 at n_c = 1e-8
  const double xi = sideband_asymmetry(dev, 1e-8, b);
  const double n = bose_einstein(dev.omega_m_hz, 4.0);
  CHECK(xi == doctest::Approx(1.0 / n).epsilon(1e-4));
  CHECK(xi == doctest::Approx(0.0441396).epsilon(1e-4));
}

TEST_CASE("sideband asymmetry unit-occupancy limit") {
  const DeviceParams dev = testutil::device();
  // pure absorption bath tuned so <n>_0 = 1
  const BathModel b = frozen_bath(0.0, 0.0, 1.0, 100.0);
  const double xi = sideband_asymmetry(dev, 1e-8, b);
  CHECK(xi == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sideband asymmetry explicit rate algebra at C = 0.5") {
  const DeviceParams dev = testutil::device();
  const BathModel b = frozen_bath(0.0, 0.0, 1.0, 100.0);
  // n_c such that gamma_om = 50 Hz
  const double n_c = 50.0 / gamma_om(dev, {dev.omega_m_hz, 1.0});
  const double gom = gamma_om(dev, {dev.omega_m_hz, n_c});
  // brute-force two-detuning occupancies
  const double red = 100.0 * 1.0 / (100.0 + gom);
  const double blue = 100.0 * 1.0 / (100.0 - gom);
  const double expected = (blue + 1.0) / red - 1.0;
  CHECK(sideband_asymmetry(dev, n_c, b) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(3.5).epsilon(1e-9));
  // C >= 1 puts the blue side at or past threshold
  const double n_c_unstable =
      1.0001 * 100.0 / gamma_om(dev, {dev.omega_m_hz, 1.0});
  CHECK_THROWS_AS(sideband_asymmetry(dev, n_c_unstable, b), InstabilityError);
}

TEST_CASE("cooperativity") {
  const DeviceParams dev = testutil::device();
  CHECK(cooperativity(dev, 0.0, 2.3e3) == 0.0);
  CHECK(cooperativity(dev, 2.0, 2.3e3) == doctest::Approx(3.547).epsilon(2e-3));
  // C = 3.9 needs n_c ~ 2.2, not exactly 2
  const double n_c_39 = 3.9 * 2.3e3 / gamma_om(dev, {dev.omega_m_hz, 1.0});
  CHECK(n_c_39 == doctest::Approx(2.199).epsilon(1e-3));
  const double gom = gamma_om(dev, {dev.omega_m_hz, 1.5});
  CHECK(cooperativity(dev, 1.5, gom) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(cooperativity(dev, 1.0, 0.0), DomainError);
}

TEST_CASE("self-oscillation threshold") {
  const DeviceParams dev = testutil::device();
  CHECK(self_oscillation_threshold(dev, 6.1e3) ==
        doctest::Approx(1.4933).epsilon(1e-3));
  CHECK(self_oscillation_threshold(dev, 408.0) ==
        doctest::Approx(0.09988).epsilon(1e-3));
  CHECK(self_oscillation_threshold(dev, 0.0) == 0.0);
  // blue-detuned linewidth stays positive below threshold
  const double gamma_i = 6.1e3;
  const double n_thr = self_oscillation_threshold(dev, gamma_i);
  for (double frac : {0.1, 0.5, 0.9, 0.999}) {
    const double gom_blue = gamma_om(dev, {-dev.omega_m_hz, frac * n_thr});
    CHECK(gamma_i + gom_blue > 0.0);
  }
}

TEST_CASE("cavity reflection") {
  const DeviceParams dev = testutil::device();
  CHECK(cavity_reflection(dev, 0.0) ==
        doctest::Approx(0.1777045).epsilon(1e-5));
  CHECK(cavity_reflection(dev, 10.0 * dev.kappa_hz) > 0.99);
  CHECK(cavity_reflection(dev, 1e15) == doctest::Approx(1.0).epsilon(1e-10));
  DeviceParams crit = dev;
  crit.kappa_e_hz = 0.5 * crit.kappa_hz;
  crit.kappa_i_hz = 0.5 * crit.kappa_hz;
  CHECK(cavity_reflection(crit, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // minimum at zero detuning by dense grid argmin
  double best = 1e300;
  double argmin = -1.0;
  for (int i = -500; i <= 500; ++i) {
    const double d = i * 2e6;
    const double r = cavity_reflection(dev, d);
    if (r < best) {
      best = r;
      argmin = d;
    }
  }
  CHECK(argmin == 0.0);
}

TEST_CASE("intracavity photons") {
  const DeviceParams dev = testutil::device();
  CHECK(intracavity_photons(dev, 0.0, 0.0) == 0.0);
  const double on = intracavity_photons(dev, 0.0, 1e-9);
  const double half = intracavity_photons(dev, 0.5 * dev.kappa_hz, 1e-9);
  CHECK(on / half == doctest::Approx(2.0).epsilon(1e-12));
  // algebraic inverse round-trip at delta = omega_m
  const double p = input_power_for_photons(dev, dev.omega_m_hz, 1.0);
  CHECK(intracavity_photons(dev, dev.omega_m_hz, p) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(intracavity_photons(dev, 0.0, -1.0), DomainError);
}

TEST_SUITE_END();
