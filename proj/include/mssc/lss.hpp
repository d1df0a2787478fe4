#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mssc/ar1.hpp"
#include "mssc/errors.hpp"
#include "mssc/marchenko_pastur.hpp"
#include "mssc/mssc_test.hpp"
#include "mssc/parallel.hpp"
#include "mssc/rng.hpp"
#include "mssc/spectral.hpp"

namespace mssc {

// Eigenvalues (ascending) of the Hermitian part (C + C^*)/2.
inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& C) {
  if (C.rows() != C.cols()) throw InvalidInput("hermitian_eigenvalues: matrix is not square");
  if (!detail::all_finite(C)) throw InvalidInput("hermitian_eigenvalues: non-finite entry");
  const ComplexMatrix H = 0.5 * (C + C.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(H, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalFailure("Hermitian eigenvalue iteration did not converge");
  }
  return eig.eigenvalues();
}

inline Eigen::VectorXd hermitian_eigenvalues(const CoherenceMatrix& C) {
  return hermitian_eigenvalues(C.C);
}

struct LssConfig {
  LssFunction f = LssFunction::Frobenius;
  double epsilon = 0.1;
  GridKind grid = GridKind::Test;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
      throw InvalidInput("LSS exponent epsilon must lie in (0, 0.5), got " +
                         std::to_string(epsilon));
    }
  }
};

// N^epsilon * B / N, the scaling that makes the statistic vanish under H0.
inline double lss_normalization(Index N, int B, double epsilon) {
  return std::pow(static_cast<double>(N), epsilon) * static_cast<double>(B) /
         static_cast<double>(N);
}

// |M^{-1} sum_k f(lambda_k) - int f dMP(c)| for one coherence spectrum.
inline double lss_deviation(const Eigen::VectorXd& eigenvalues, LssFunction f, double c) {
  const Index M = eigenvalues.size();
  double sum = 0.0;
  for (Index k = 0; k < M; ++k) {
    const double lambda = eigenvalues(k);
    if (f == LssFunction::LogDet && !(lambda > 0.0)) {
      throw DegenerateSpectrum("coherence matrix has eigenvalue " + std::to_string(lambda) +
                               "; log-determinant undefined");
    }
    sum += apply_lss_function(f, lambda);
  }
  return std::abs(sum / static_cast<double>(M) - mp_integral(f, c));
}

namespace detail {

inline void check_lss_sizes(Index N, int B, Index M) {
  if (M < 1) throw InvalidInput("LSS statistic needs at least one series");
  if (N < 2) throw InvalidInput("LSS statistic needs N >= 2");
  check_span(N, B);
  if (B == 0) throw InvalidInput("LSS statistic needs a positive smoothing span");
}

}  // namespace detail

inline double lss_statistic(const DftTable& dft, const FrequencyGrid& grid, const LssConfig& config) {
  config.validate();
  const Index M = dft.num_series();
  const Index N = dft.num_samples();
  const int B = grid.smoothing_span();
  detail::check_lss_sizes(N, B, M);
  const double c = static_cast<double>(M) / (static_cast<double>(B) + 1.0);
  double worst = 0.0;
  for (Index g = 0; g < grid.size(); ++g) {
    const auto C = coherence_matrix(smoothed_spectral_matrix(dft, grid.bin(g), B));
    worst = std::max(worst, lss_deviation(hermitian_eigenvalues(C), config.f, c));
  }
  return worst / lss_normalization(N, B, config.epsilon);
}

inline double lss_statistic(const TimeSeriesPanel& panel, int B, const LssConfig& config) {
  detail::check_lss_sizes(panel.num_samples(), B, panel.num_series());
  return lss_statistic(normalized_dft(panel), build_grid(config.grid, panel.num_samples(), B),
                       config);
}

// ---------------------------------------------------------------------------
// Statistics evaluated together on one panel
// ---------------------------------------------------------------------------

enum class StatisticKind { Mssc, LssFrobenius, LssLogDet };

inline const char* to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::Mssc: return "MSSC";
    case StatisticKind::LssFrobenius: return "FROB";
    case StatisticKind::LssLogDet: return "LOG";
  }
  return "?";
}

inline StatisticKind parse_statistic(const std::string& name) {
  std::string s;
  for (char ch : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "mssc") return StatisticKind::Mssc;
  if (s == "frob" || s == "frobenius" || s == "lss-frobenius") return StatisticKind::LssFrobenius;
  if (s == "log" || s == "logdet" || s == "lss-logdet") return StatisticKind::LssLogDet;
  throw InvalidInput("unknown statistic '" + name + "' (expected mssc, frob or log)");
}

struct StatisticValues {
  MsscResult mssc;
  double frobenius = 0.0;
  double logdet = 0.0;

  double get(StatisticKind kind) const {
    switch (kind) {
      case StatisticKind::Mssc: return mssc.value;
      case StatisticKind::LssFrobenius: return frobenius;
      case StatisticKind::LssLogDet: return logdet;
    }
    return 0.0;
  }
};

// One DFT and one coherence matrix per grid point feed every requested
// statistic; eigenvalues are only computed when an LSS statistic is asked for.
inline StatisticValues evaluate_statistics(const DftTable& dft, const FrequencyGrid& grid,
                                           std::span<const StatisticKind> kinds,
                                           double epsilon = 0.1) {
  const Index M = dft.num_series();
  const Index N = dft.num_samples();
  const int B = grid.smoothing_span();
  auto wants = [&](StatisticKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
  const bool want_mssc = wants(StatisticKind::Mssc);
  const bool want_frob = wants(StatisticKind::LssFrobenius);
  const bool want_log = wants(StatisticKind::LssLogDet);
  if (want_mssc) detail::check_sizes(N, B, M);
  if (want_frob || want_log) {
    LssConfig{LssFunction::Frobenius, epsilon}.validate();
    detail::check_lss_sizes(N, B, M);
  }

  const double c = static_cast<double>(M) / (static_cast<double>(B) + 1.0);
  MsscAccumulator acc;
  double frob = 0.0;
  double logdet = 0.0;
  for (Index g = 0; g < grid.size(); ++g) {
    const auto C = coherence_matrix(smoothed_spectral_matrix(dft, grid.bin(g), B));
    if (want_mssc) acc.add(C, g);
    if (want_frob || want_log) {
      const Eigen::VectorXd eig = hermitian_eigenvalues(C);
      if (want_frob) frob = std::max(frob, lss_deviation(eig, LssFunction::Frobenius, c));
      if (want_log) logdet = std::max(logdet, lss_deviation(eig, LssFunction::LogDet, c));
    }
  }
  StatisticValues out;
  if (want_mssc) {
    out.mssc.value = acc.value();
    out.mssc.argmax = acc.argmax();
    out.mssc.rescaled = mssc_rescale(acc.value(), N, B, M);
  }
  if (want_frob || want_log) {
    const double scale = lss_normalization(N, B, epsilon);
    out.frobenius = frob / scale;
    out.logdet = logdet / scale;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

// Statistics of n_reps independent panels from `simulator`; replication r
// uses RngStream{seed, domain, r} and lands in slot r.
inline std::vector<StatisticValues> simulate_statistics(
    const Ar1Simulator& simulator, Index N, int B, std::span<const StatisticKind> kinds,
    Index n_reps, std::uint64_t seed, std::uint32_t domain, unsigned parallelism = 1,
    double epsilon = 0.1, GridKind grid_kind = GridKind::Test) {
  const FftPlan plan(static_cast<std::size_t>(N));
  const FrequencyGrid grid = build_grid(grid_kind, N, B);
  std::vector<StatisticValues> out(static_cast<std::size_t>(n_reps));
  parallel_for(out.size(), parallelism, [&](std::size_t r) {
    const RngStream stream{seed, domain, static_cast<std::uint32_t>(r)};
    const TimeSeriesPanel panel = simulator.simulate(N, stream);
    out[r] = evaluate_statistics(normalized_dft(panel, plan), grid, kinds, epsilon);
  });
  return out;
}

// Sample quantile by linear interpolation between order statistics: with
// h = (n - 1) p, returns x_(floor h) + (h - floor h)(x_(floor h + 1) - x_(floor h)),
// 0-based on the sorted sample.
inline double empirical_quantile(std::vector<double> samples, double p) {
  if (samples.empty()) throw InvalidInput("empirical_quantile: no samples");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("empirical_quantile: level outside [0, 1]");
  std::sort(samples.begin(), samples.end());
  const double h = static_cast<double>(samples.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= samples.size()) return samples.back();
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[lo + 1] - samples[lo]);
}

struct CalibratedThreshold {
  double kappa = 0.0;
  Index n_reps = 0;
  std::uint64_t seed = 0;
  StatisticKind kind = StatisticKind::Mssc;
  double alpha = 0.05;
};

struct CalibrationOptions {
  unsigned parallelism = 1;
  std::uint32_t domain = stream_domain(StreamPurpose::Calibration);
  double epsilon = 0.1;
  GridKind grid = GridKind::Test;
};

// (1 - alpha) sample quantile of each statistic under the H0 model. All kinds
// are computed from the same n_reps panels.
inline std::vector<CalibratedThreshold> calibrate_thresholds_mc(
    const Ar1Spec& model, Index N, int B, std::span<const StatisticKind> kinds, double alpha,
    Index n_reps, std::uint64_t seed, const CalibrationOptions& options = {}) {
  if (model.variant != Ar1Variant::H0) {
    throw InvalidInput("threshold calibration needs an H0 model");
  }
  if (n_reps < 100) {
    throw InvalidInput("threshold calibration needs at least 100 replications, got " +
                       std::to_string(n_reps));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  const Ar1Simulator simulator(model);
  const auto values = simulate_statistics(simulator, N, B, kinds, n_reps, seed, options.domain,
                                          options.parallelism, options.epsilon, options.grid);
  std::vector<CalibratedThreshold> out;
  for (StatisticKind kind : kinds) {
    std::vector<double> samples;
    samples.reserve(values.size());
    for (const auto& v : values) samples.push_back(v.get(kind));
    const double kappa = empirical_quantile(std::move(samples), 1.0 - alpha);
    if (!std::isfinite(kappa)) throw NumericalFailure("calibrated threshold is not finite");
    out.push_back({kappa, n_reps, seed, kind, alpha});
  }
  return out;
}

inline CalibratedThreshold calibrate_threshold_mc(const Ar1Spec& model, Index N, int B,
                                                  StatisticKind kind, double alpha, Index n_reps,
                                                  std::uint64_t seed,
                                                  const CalibrationOptions& options = {}) {
  const StatisticKind kinds[] = {kind};
  return calibrate_thresholds_mc(model, N, B, kinds, alpha, n_reps, seed, options).front();
}

}  // namespace mssc
