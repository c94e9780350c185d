#include "omckit/noise.hpp"

#include <cmath>

#include "omckit/constants.hpp"
#include "omckit/errors.hpp"

namespace omckit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_unit_interval(std::uint64_t bits) {
  // (0, 1]: top 53 bits, then shift off zero
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
  std::uint64_t x = splitmix64(seed_ ^ splitmix64(stream));
  x = splitmix64(x ^ splitmix64(counter));
  return to_unit_interval(x);
}

double CounterRng::gaussian(std::uint64_t stream,
                            std::uint64_t counter) const {
  const double u1 = uniform(stream, 2 * counter);
  const double u2 = uniform(stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * constants::pi * u2);
}

Spectrum add_measurement_noise(const Spectrum& spec, std::uint64_t seed,
                               int n_avg) {
  if (n_avg < 1) throw DomainError("add_measurement_noise: n_avg must be >= 1");
  const double rel = 1.0 / std::sqrt(static_cast<double>(n_avg));
  const CounterRng rng(seed);
  Spectrum out = spec;
  for (std::size_t i = 0; i < out.psd.size(); ++i)
    out.psd[i] *= 1.0 + rel * rng.gaussian(0, i);
  return out;
}

}  // namespace omckit
