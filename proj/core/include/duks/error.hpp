#pragma once

#include <stdexcept>
#include <string>

namespace duks {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (bad truncation pairing, invalid
/// step sizes, unknown keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant was found violated (e.g. a field that should be
/// Hermitian is not).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Operations invoked out of order or on data that does not line up
/// (querying past a simulated horizon, mismatched sample grids).
class SequencingError : public Error {
 public:
  using Error::Error;
};

/// A path left the admissible region: a coefficient became non-finite or
/// exceeded the blow-up guard.
class DivergenceError : public Error {
 public:
  DivergenceError(int mode, double time, const std::string& what)
      : Error(what), mode_(mode), time_(time) {}

  int mode() const noexcept { return mode_; }
  double time() const noexcept { return time_; }

 private:
  int mode_;
  double time_;
};

}  // namespace duks
