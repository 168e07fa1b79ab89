#pragma once

#include <stdexcept>
#include <string>

namespace pdmp {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A simulated path exceeded the configured jump cap on a bounded horizon.
struct ExplosionError : Error {
  using Error::Error;
};

// Adaptive quadrature failed to reach the requested tolerance.
struct QuadratureError : Error {
  using Error::Error;
};

// Thinning was requested without a rate bound, or an observed rate
// exceeded the declared bound.
struct RateBoundError : Error {
  using Error::Error;
};

// An estimator was asked to run on too few qualifying observations.
struct InsufficientDataError : Error {
  using Error::Error;
};

// Malformed input file or unwritable output.
struct IoError : Error {
  using Error::Error;
};

}  // namespace pdmp
