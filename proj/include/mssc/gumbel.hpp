#pragma once

#include <cmath>
#include <string>

#include "mssc/errors.hpp"

namespace mssc {

// Standard Gumbel (type I extreme value) law, F(t) = exp(-exp(-t)).
struct GumbelLaw {
  static double cdf(double t) { return std::exp(-std::exp(-t)); }

  // 1 - F(t), accurate in the upper tail.
  static double survival(double t) { return -std::expm1(-std::exp(-t)); }

  static double pdf(double t) { return std::exp(-t - std::exp(-t)); }

  static double quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw InvalidInput("Gumbel quantile level must lie in (0, 1), got " +
                         std::to_string(alpha));
    }
    return -std::log(-std::log(alpha));
  }
};

inline double gumbel_cdf(double t) { return GumbelLaw::cdf(t); }
inline double gumbel_quantile(double alpha) { return GumbelLaw::quantile(alpha); }

}  // namespace mssc
