#pragma once

#include <cstdint>

#include "omckit/spectrum.hpp"

namespace omckit {

/// Counter-based random stream: every draw is a pure function of
/// (seed, stream, counter), so sweep points can be generated in any order
/// or thread and still reproduce bit-identically.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Uniform in (0, 1].
  double uniform(std::uint64_t stream, std::uint64_t counter) const;

  /// Standard normal via Box-Muller on two derived uniforms.
  double gaussian(std::uint64_t stream, std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

/// Gaussian multiplicative approximation to n_avg-average PSD estimator
/// statistics: each bin scaled by (1 + g/sqrt(n_avg)). Reasonable for
/// n_avg >= 10; increasingly crude below that.
Spectrum add_measurement_noise(const Spectrum& spec, std::uint64_t seed,
                               int n_avg);

}  // namespace omckit
