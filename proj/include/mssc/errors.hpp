#pragma once

#include <stdexcept>
#include <string>

namespace mssc {

// Base of every error raised by the library. The CLI maps the subclasses
// onto exit codes (1 for bad input, 2 for numerical trouble).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

// A smoothed spectral matrix with a non-positive diagonal entry, or a
// coherence matrix with a non-positive eigenvalue where log is required.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class CalibrationFailure : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace detail

}  // namespace mssc
