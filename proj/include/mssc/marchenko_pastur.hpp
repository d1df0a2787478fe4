#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "mssc/errors.hpp"

namespace mssc {

// Test functions f applied to the eigenvalues of a coherence matrix.
enum class LssFunction {
  Frobenius,  // f(x) = (x - 1)^2
  LogDet,     // f(x) = log x
};

inline double apply_lss_function(LssFunction f, double x) {
  switch (f) {
    case LssFunction::Frobenius:
      return (x - 1.0) * (x - 1.0);
    case LssFunction::LogDet:
      return std::log(x);
  }
  return 0.0;
}

inline const char* to_string(LssFunction f) {
  return f == LssFunction::Frobenius ? "Frobenius" : "LogDet";
}

// Marcenko-Pastur law with ratio c in (0, 1]; there is no atom at zero in
// this range.
class MpLaw {
 public:
  explicit MpLaw(double c) : c_(c) {
    if (!(c > 0.0 && c <= 1.0)) {
      throw InvalidInput("Marcenko-Pastur ratio must lie in (0, 1], got " + std::to_string(c));
    }
  }

  double ratio() const { return c_; }
  double lambda_minus() const { return (1.0 - std::sqrt(c_)) * (1.0 - std::sqrt(c_)); }
  double lambda_plus() const { return (1.0 + std::sqrt(c_)) * (1.0 + std::sqrt(c_)); }

  double density(double x) const {
    const double lo = lambda_minus();
    const double hi = lambda_plus();
    if (x <= lo || x >= hi) return 0.0;
    return std::sqrt((hi - x) * (x - lo)) / (2.0 * std::numbers::pi * c_ * x);
  }

 private:
  double c_;
};

// Closed forms of the integral of f against the Marcenko-Pastur law:
//   Frobenius: variance of the law, c.
//   LogDet:    (c - 1)/c log(1 - c) - 1.
inline double mp_integral(LssFunction f, double c) {
  if (!(c > 0.0)) throw InvalidInput("Marcenko-Pastur ratio must be positive");
  if (c >= 1.0) {
    throw Unsupported("Marcenko-Pastur integrals need c < 1, got c = " + std::to_string(c));
  }
  switch (f) {
    case LssFunction::Frobenius:
      return c;
    case LssFunction::LogDet:
      return (c - 1.0) / c * std::log1p(-c) - 1.0;
  }
  return 0.0;
}

}  // namespace mssc
