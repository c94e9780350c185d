#include <doctest.h>

#include <cmath>

#include "omckit/bath.hpp"
#include "omckit/constants.hpp"
#include "omckit/errors.hpp"
#include "omckit/physics.hpp"
#include "omckit/special.hpp"
#include "testutil.hpp"

using namespace omckit;

TEST_SUITE_BEGIN("bath");

namespace {
ToyThreePhonon toy(double omega_1_hz, double t_p_k, double coupling = 1.0) {
  ToyThreePhonon m;
  m.omega_1_hz = omega_1_hz;
  m.omega_m_hz = 3.6e9;
  m.omega_2_hz = omega_1_hz - m.omega_m_hz;
  m.coupling_hz = coupling;
  m.t_p_k = t_p_k;
  return m;
}
}  // namespace

TEST_CASE("scattering rate arithmetic") {
  const ScatteringRates r = scattering_rates(1.0, 2.0, 1.0, 0.0);
  CHECK(r.gamma_plus_hz == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(r.gamma_minus_hz == 0.0);
  CHECK_THROWS_AS(scattering_rates(1.0, -1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("toy rates vanish at zero temperature") {
  const ScatteringRates r = toy_rates(toy(100e9, 0.0), 0.0);
  CHECK(r.gamma_plus_hz == 0.0);
  CHECK(r.gamma_minus_hz == 0.0);
}

TEST_CASE("toy model validation") {
  ToyThreePhonon bad = toy(100e9, 1.0);
  bad.omega_2_hz = bad.omega_1_hz - 1.001 * bad.omega_m_hz;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  ToyThreePhonon swapped = toy(100e9, 1.0);
  std::swap(swapped.omega_1_hz, swapped.omega_2_hz);
  CHECK_THROWS_AS(swapped.validate(), DomainError);
}

TEST_CASE("detailed balance at the effective-bath occupancy") {
  const ToyThreePhonon m = toy(100e9, 1.0);
  const EffectiveBath eff = toy_effective_bath(m);
  const ScatteringRates r = toy_rates(m, eff.n_p);
  CHECK(r.gamma_plus_hz ==
        doctest::Approx(r.gamma_minus_hz).epsilon(1e-12));
  // occupancies are thermal with n_2 > n_1 (omega_1 > omega_2), so both
  // gamma_p and n_p come out positive
  CHECK(eff.gamma_p_hz > 0.0);
  CHECK(eff.n_p > 0.0);
}

TEST_CASE("effective bath reproduces the Bose-Einstein occupancy") {
  const EffectiveBath eff = toy_effective_bath(toy(100e9, 1.0));
  const double expected = bose_einstein(3.6e9, 1.0);
  CHECK(std::fabs(eff.n_p - expected) <= 1e-9 * expected);
}

TEST_CASE("effective bath identity across the (omega_1, T_p) plane") {
  testutil::TestRng rng(31);
  for (int i = 0; i < 60; ++i) {
    const double omega_1 = rng.uniform(10e9, 400e9);
    const double t_p = std::exp(rng.uniform(std::log(0.05), std::log(10.0)));
    const EffectiveBath eff = toy_effective_bath(toy(omega_1, t_p));
    const double expected = bose_einstein(3.6e9, t_p);
    CHECK(std::fabs(eff.n_p - expected) <= 1e-9 * expected);
  }
}

TEST_CASE("gamma_p tends to zero with temperature") {
  double prev = 1e300;
  for (double t : {1.0, 0.5, 0.25, 0.12, 0.06}) {
    const EffectiveBath eff = toy_effective_bath(toy(50e9, t));
    CHECK(eff.gamma_p_hz < prev);
    prev = eff.gamma_p_hz;
  }
  CHECK(prev < 1e-8);
  CHECK_THROWS_AS(toy_effective_bath(toy(100e9, 0.0)), DomainError);
}

TEST_CASE("rate-equation fixed point and decay rate via RK4 oracle") {
  const ToyThreePhonon m = toy(80e9, 2.0, 1.0);
  const EffectiveBath eff = toy_effective_bath(m);
  const auto dndt = [&](double n) {
    const ScatteringRates r = toy_rates(m, n);
    return r.gamma_plus_hz - r.gamma_minus_hz;
  };
  for (double n0 : {0.0, 5.0, 100.0}) {
    const double dt = 0.02 / eff.gamma_p_hz;
    const int steps = 700;  // 14 decay times
    const std::vector<double> traj = testutil::rk4_oracle(dndt, n0, dt, steps);
    CHECK(traj.back() == doctest::Approx(eff.n_p).epsilon(1e-4));
    if (std::fabs(n0 - eff.n_p) < 1e-6) continue;
    // exponential-rate fit over the first 2 decay times
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = 0; i <= 100; ++i) {
      const double d = std::fabs(traj[i] - eff.n_p);
      if (d < 1e-9) break;
      const double t = i * dt;
      sx += t;
      sy += std::log(d);
      sxx += t * t;
      sxy += t * std::log(d);
      ++cnt;
    }
    const double slope =
        (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(-slope == doctest::Approx(eff.gamma_p_hz).epsilon(0.01));
  }
}

TEST_CASE("boson mixing integral analytic identities") {
  CHECK(boson_mixing_integral(2.0, 0.0) ==
        doctest::Approx(M_PI * M_PI / 3.0).epsilon(1e-8));
  CHECK(boson_mixing_integral(3.0, 0.0) ==
        doctest::Approx(7.212341418957566).epsilon(1e-7));
  // a Gamma(a) zeta(a) for a general exponent
  for (double a : {1.5, 2.5, 4.0}) {
    const double expected = a * std::tgamma(a) * riemann_zeta(a);
    CHECK(boson_mixing_integral(a, 0.0) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
  CHECK_THROWS_AS(boson_mixing_integral(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(boson_mixing_integral(2.0, -1.0), DomainError);
}

TEST_CASE("boson mixing integral vs quadrature oracle") {
  testutil::TestRng rng(41);
  const auto integrand = [](double a, double x) {
    const double s = 2.0 * std::sinh(0.5 * x);
    return std::pow(x, a) / (s * s);
  };
  // includes exponents close to the a > 1 convergence boundary, where the
  // integrand is singular-derivative at the origin
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(1.3, 5.0);
    const double x_c = rng.uniform(0.05, 8.0);
    const double oracle = testutil::simpson_oracle(
        [&](double x) { return integrand(a, x); }, x_c, 80.0, 1e-12);
    CHECK(boson_mixing_integral(a, x_c) ==
          doctest::Approx(oracle).epsilon(1e-8));
  }
  // x_c = 0 at a low exponent against the analytic identity
  CHECK(boson_mixing_integral(1.2, 0.0) ==
        doctest::Approx(1.2 * std::tgamma(1.2) * riemann_zeta(1.2))
            .epsilon(1e-8));
}

TEST_CASE("boson mixing integral decreases in the cutoff") {
  double prev = 1e300;
  for (double x_c : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0, 25.0, 60.0}) {
    const double v = boson_mixing_integral(3.0, x_c);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("deep cutoff matches the incomplete-gamma approximation") {
  const double i30 = boson_mixing_integral(3.0, 30.0);
  CHECK(i30 == doctest::Approx(upper_incomplete_gamma(4.0, 30.0)).epsilon(0.05));
}

namespace {
ContinuumBath continuum(double a, double t_c_k, double prefactor = 1.0) {
  ContinuumBath b;
  b.exponent_a = a;
  b.omega_c_hz = t_c_k / constants::quantum_temperature_k(1.0);
  b.prefactor_hz = prefactor;
  return b;
}
}  // namespace

TEST_CASE("gamma_p asymptote brackets and ratio limits") {
  const double omega_m = 3.6e9;
  const ContinuumBath b2 = continuum(2.0, 2.0);
  const ContinuumBath b3 = continuum(3.0, 2.0);

  // low-T ratio within 10% beyond x_c = 20 (a = 2)
  for (double x_c : {20.0, 25.0, 40.0, 80.0}) {
    const double t_p = 2.0 / x_c;
    const double ratio = gamma_p_low_t(b2, omega_m, t_p) /
                         gamma_p_integral(b2, omega_m, t_p);
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
  }
  // a = 3 needs a slightly deeper cutoff
  for (double x_c : {30.0, 60.0}) {
    const double t_p = 2.0 / x_c;
    const double ratio = gamma_p_low_t(b3, omega_m, t_p) /
                         gamma_p_integral(b3, omega_m, t_p);
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
  }
  // high-T ratio within 1% below x_c = 0.01
  for (double x_c : {0.01, 0.002}) {
    for (const ContinuumBath& b : {b2, b3}) {
      const double t_p = 2.0 / x_c;
      const double ratio = gamma_p_high_t(b, omega_m, t_p) /
                           gamma_p_integral(b, omega_m, t_p);
      CHECK(ratio > 0.99);
      CHECK(ratio < 1.01);
    }
  }
  // global bracket: low <= integral <= high
  for (double t_p : {0.05, 0.2, 1.0, 2.0, 5.0, 50.0}) {
    const double lo = gamma_p_low_t(b3, omega_m, t_p);
    const double mid = gamma_p_integral(b3, omega_m, t_p);
    const double hi = gamma_p_high_t(b3, omega_m, t_p);
    CHECK(lo <= mid * (1.0 + 1e-12));
    CHECK(mid <= hi * (1.0 + 1e-12));
  }
}

TEST_CASE("gamma_p asymptote arithmetic") {
  const double omega_m = 3.6e9;
  const ContinuumBath b = continuum(3.0, 2.0, 1.0);
  // activated form at T_p = T_c: prefactor_eff * T_c * e^-1 with
  // prefactor_eff = prefactor * omega_m * T_c^a
  const double expected = 1.0 * omega_m * std::pow(2.0, 3.0) * 2.0 *
                          std::exp(-1.0);
  CHECK(gamma_p_low_t(b, omega_m, 2.0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(gamma_p_low_t(b, omega_m, 1e-300) == 0.0);

  // power law: doubling T_p scales by 2^(a+1)
  const double h1 = gamma_p_high_t(b, omega_m, 1.3);
  const double h2 = gamma_p_high_t(b, omega_m, 2.6);
  CHECK(h2 / h1 == doctest::Approx(std::pow(2.0, 4.0)).epsilon(1e-12));

  // a = 2 coefficient is pi^2/3
  const ContinuumBath b2 = continuum(2.0, 2.0, 1.0);
  CHECK(gamma_p_high_t(b2, omega_m, 1.0) ==
        doctest::Approx(omega_m * M_PI * M_PI / 3.0).epsilon(1e-10));

  ContinuumBath bad = b;
  bad.exponent_a = 0.9;
  CHECK_THROWS_AS(gamma_p_high_t(bad, omega_m, 1.0), DomainError);
  CHECK_THROWS_AS(gamma_p_integral(b, omega_m, 0.0), DomainError);
}

TEST_CASE("continuum-elastic integrand variant") {
  const double omega_m = 3.6e9;
  ContinuumBath b = continuum(3.0, 2.0, 1e-40);
  const double g1 = gamma_p_continuum_elastic(b, omega_m, 1.0);
  CHECK(g1 > 0.0);
  // raising the cutoff suppresses the rate
  ContinuumBath higher = b;
  higher.omega_c_hz *= 2.0;
  CHECK(gamma_p_continuum_elastic(higher, omega_m, 1.0) < g1);
  // hotter bath scatters faster
  CHECK(gamma_p_continuum_elastic(b, omega_m, 2.0) > g1);
}

TEST_SUITE_END();
