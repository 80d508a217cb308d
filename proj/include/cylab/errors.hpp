#pragma once

#include <stdexcept>
#include <string>

namespace cylab {

// Base for everything thrown intentionally by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: invalid profile data, malformed config, out-of-range
// parameters.  CLI maps this to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// An iteration failed to converge: shooting, Newton, doubling schedules.
// CLI maps this to exit code 3.
struct ConvergenceError : Error {
  using Error::Error;
};

// A quantity left its mathematically required range at runtime: conjugate
// point detected where none may exist, non-monotone Busemann schedule,
// horocycle escaping the computational window.
struct GeometryError : Error {
  using Error::Error;
};

}  // namespace cylab
