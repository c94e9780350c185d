#pragma once

#include <stdexcept>
#include <string>

namespace omckit {

// Base class for all omckit exceptions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

// Total mechanical damping <= 0: the configuration self-oscillates and has no
// steady-state occupancy.
struct InstabilityError : Error {
  using Error::Error;
};

// Structured input (config, CSV, spectrum) fails validation.
struct ValidationError : Error {
  using Error::Error;
};

// Filesystem / stream failure.
struct IoError : Error {
  using Error::Error;
};

// Spectrum has no resolvable peak above the noise floor.
struct NoPeakError : Error {
  using Error::Error;
};

// Fit input lacks the points needed to determine the parameters.
struct InsufficientDataError : Error {
  using Error::Error;
};

}  // namespace omckit
