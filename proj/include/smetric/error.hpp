#pragma once

#include <stdexcept>
#include <string>

namespace smetric {

/// Base class for every error the library raises on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mixed point dimensions where equal dimensions are required.
struct DimensionError : Error {
  using Error::Error;
};

/// A value outside the mathematical domain of an operation
/// (negative roughness degree, non-finite coordinate, ...).
struct DomainError : Error {
  using Error::Error;
};

/// A call that violates a documented precondition (bad schedule,
/// unmet verdict gate, empty sample, ...).
struct UsageError : Error {
  using Error::Error;
};

/// A config file or expression that does not parse. `line` is 1-based
/// when known, 0 otherwise.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg, int line_no = 0)
      : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
        line(line_no) {}
  int line = 0;
};

}  // namespace smetric
