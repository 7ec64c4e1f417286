#pragma once

#include <stdexcept>
#include <string>

namespace regait {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Singular systems, non-convergence, non-finite values.
struct NumericError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
  int line;
};

struct DimensionError : Error {
  using Error::Error;
};

}  // namespace regait
