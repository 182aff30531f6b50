#pragma once

#include <stdexcept>
#include <string>

namespace coopdea {

// Base for every recoverable failure raised by the library. Usage errors
// (malformed arguments from the caller) are reported as std::invalid_argument
// instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data: panels, CSV files, degenerate games.
class InputError : public Error {
 public:
  using Error::Error;
};

// A request exceeds the exact-enumeration limits of a solver.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// A linear program failed in a way that valid input should not produce.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace coopdea
