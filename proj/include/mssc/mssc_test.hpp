#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>

#include "mssc/errors.hpp"
#include "mssc/gumbel.hpp"
#include "mssc/panel.hpp"
#include "mssc/spectral.hpp"

namespace mssc {

// Location of the largest squared coherence: series i < j (0-based) at the
// grid point with index grid_index, i.e. Fourier bin `bin` and frequency nu.
struct CoherenceArgmax {
  Index i = 0;
  Index j = 1;
  Index grid_index = 0;
  Index bin = 0;
  double nu = 0.0;

  bool operator==(const CoherenceArgmax&) const = default;
};

struct MsscResult {
  double value = 0.0;     // max |c_ij(nu)|^2 over i < j and grid nu
  CoherenceArgmax argmax;
  double rescaled = 0.0;  // (B+1) value - log(N/(B+1)) - log(M(M-1)/2)
};

namespace detail {

inline void check_sizes(Index N, int B, Index M) {
  if (M < 2) throw InvalidInput("at least two series are required, got M = " + std::to_string(M));
  if (N < 2) throw InvalidInput("at least two samples are required, got N = " + std::to_string(N));
  check_span(N, B);
}

inline double centering(Index N, int B, Index M) {
  const double b1 = static_cast<double>(B) + 1.0;
  const double pairs = 0.5 * static_cast<double>(M) * static_cast<double>(M - 1);
  return std::log(static_cast<double>(N) / b1) + std::log(pairs);
}

}  // namespace detail

inline double mssc_rescale(double value, Index N, int B, Index M) {
  return (static_cast<double>(B) + 1.0) * value - detail::centering(N, B, M);
}

// Running maximum of |c_ij|^2 over coherence matrices fed one grid point at a
// time. Ties go to the lexicographically smallest (i, j, grid_index), so the
// result does not depend on the order in which grid points are supplied.
class MsscAccumulator {
 public:
  void add(const CoherenceMatrix& coherence, Index grid_index) {
    const ComplexMatrix& C = coherence.C;
    const Index M = C.rows();
    for (Index i = 0; i < M; ++i) {
      for (Index j = i + 1; j < M; ++j) {
        const double v = std::norm(C(i, j));
        if (!found_ || v > best_ ||
            (v == best_ && std::tie(i, j, grid_index) <
                               std::tie(arg_.i, arg_.j, arg_.grid_index))) {
          best_ = v;
          found_ = true;
          arg_ = {i, j, grid_index, coherence.bin, coherence.nu};
        }
      }
    }
  }

  bool empty() const { return !found_; }
  double value() const { return best_; }
  const CoherenceArgmax& argmax() const { return arg_; }

 private:
  double best_ = -1.0;
  bool found_ = false;
  CoherenceArgmax arg_;
};

// Maximum sample spectral coherence over all pairs and the given grid.
inline MsscResult mssc_statistic(const DftTable& dft, const FrequencyGrid& grid) {
  const Index M = dft.num_series();
  const Index N = dft.num_samples();
  const int B = grid.smoothing_span();
  detail::check_sizes(N, B, M);
  MsscAccumulator acc;
  for (Index g = 0; g < grid.size(); ++g) {
    acc.add(coherence_matrix(smoothed_spectral_matrix(dft, grid.bin(g), B)), g);
  }
  MsscResult out;
  out.value = acc.value();
  out.argmax = acc.argmax();
  out.rescaled = mssc_rescale(out.value, N, B, M);
  return out;
}

// The default test grid matches the Gumbel calibration. GridKind::Fourier
// scans every Fourier bin; the Gumbel threshold is not justified there.
inline MsscResult mssc_statistic(const TimeSeriesPanel& panel, int B,
                                 GridKind grid = GridKind::Test) {
  detail::check_sizes(panel.num_samples(), B, panel.num_series());
  return mssc_statistic(normalized_dft(panel), build_grid(grid, panel.num_samples(), B));
}

// Critical value for max |c_ij|^2 at level alpha:
// (q_{1-alpha} + log(N/(B+1)) + log(M(M-1)/2)) / (B+1).
inline double mssc_threshold(Index N, int B, Index M, double alpha) {
  detail::check_sizes(N, B, M);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("significance level must lie in (0, 1), got " + std::to_string(alpha));
  }
  return (gumbel_quantile(1.0 - alpha) + detail::centering(N, B, M)) /
         (static_cast<double>(B) + 1.0);
}

struct TestConfig {
  Index N = 0;
  int B = 0;
  Index M = 0;
  double alpha = 0.05;
};

struct TestReport {
  std::string statistic = "MSSC";
  double value = 0.0;
  double threshold = 0.0;
  double p_value = 1.0;
  bool reject = false;
  TestConfig config;
  std::optional<CoherenceArgmax> argmax;
  std::optional<double> rescaled;
  GridKind grid = GridKind::Test;
};

// Turns a computed statistic into a decision. Rejection uses a strict
// inequality, so a statistic sitting exactly on the threshold is accepted.
inline TestReport mssc_decision(const MsscResult& result, Index N, int B, Index M,
                                double alpha) {
  TestReport report;
  report.value = result.value;
  report.threshold = mssc_threshold(N, B, M, alpha);
  report.reject = result.value > report.threshold;
  report.p_value = GumbelLaw::survival(result.rescaled);
  report.config = {N, B, M, alpha};
  report.argmax = result.argmax;
  report.rescaled = result.rescaled;
  return report;
}

inline TestReport mssc_test(const TimeSeriesPanel& panel, int B, double alpha,
                            GridKind grid = GridKind::Test) {
  const MsscResult result = mssc_statistic(panel, B, grid);
  TestReport report =
      mssc_decision(result, panel.num_samples(), B, panel.num_series(), alpha);
  report.grid = grid;
  return report;
}

}  // namespace mssc
