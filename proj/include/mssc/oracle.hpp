#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mssc/ar1.hpp"
#include "mssc/errors.hpp"
#include "mssc/fft.hpp"
#include "mssc/panel.hpp"
#include "mssc/rng.hpp"
#include "mssc/spectral.hpp"

// Reference computations that avoid the fast paths: definitional DFT sums,
// the smoothed estimate as a literal double loop, and the closed-form
// quantities available for diagonal AR(1) models (transfer function,
// linearized estimate, limiting variance).
namespace mssc::oracle {

namespace detail {

// exp(-2 pi i n q / N) with n q reduced mod N first.
inline Complex unit_root(Index n, Index q, Index N) {
  const Index r = ((n * q) % N + N) % N;
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(N);
  return std::polar(1.0, angle);
}

inline Complex dft_at(std::span<const Complex> series, Index q) {
  const Index N = static_cast<Index>(series.size());
  Complex acc(0.0, 0.0);
  for (Index n = 0; n < N; ++n) acc += series[static_cast<std::size_t>(n)] * unit_root(n, q, N);
  return acc / std::sqrt(static_cast<double>(N));
}

}  // namespace detail

// O(M N^2) normalized DFT straight from the definition.
inline DftTable naive_dft(const TimeSeriesPanel& panel) {
  const Index M = panel.num_series();
  const Index N = panel.num_samples();
  RowComplexMatrix out(M, N);
  for (Index m = 0; m < M; ++m) {
    for (Index k = 0; k < N; ++k) out(m, k) = detail::dft_at(panel.series(m), k);
  }
  return DftTable(std::move(out));
}

// s_ij at frequency bin/N: (B+1)^{-1} sum_b xi_i(nu + b/N) conj(xi_j(nu + b/N)),
// each xi evaluated by its own sum over n.
inline Complex brute_force_smoothed_estimate(const TimeSeriesPanel& panel, Index i, Index j,
                                             Index bin, int B) {
  const Index N = panel.num_samples();
  Complex acc(0.0, 0.0);
  for (int b = -B / 2; b <= B / 2; ++b) {
    Complex xi_i(0.0, 0.0);
    Complex xi_j(0.0, 0.0);
    for (Index n = 0; n < N; ++n) {
      const Complex w = detail::unit_root(n, bin + b, N);
      xi_i += panel(i, n) * w;
      xi_j += panel(j, n) * w;
    }
    acc += xi_i * std::conj(xi_j) / static_cast<double>(N);
  }
  return acc / (static_cast<double>(B) + 1.0);
}

// Outer spectral factor of an AR(1) with coefficient theta driven by unit
// variance noise: h(nu) = 1 / (1 - theta exp(-2 pi i nu)), s = |h|^2.
struct TransferFunction {
  double theta = 0.0;

  Complex h(double nu) const {
    return 1.0 / (1.0 - theta * std::polar(1.0, -2.0 * std::numbers::pi * nu));
  }
  double spectral_density(double nu) const {
    return 1.0 / (1.0 - 2.0 * theta * std::cos(2.0 * std::numbers::pi * nu) + theta * theta);
  }
  double min_density() const { return 1.0 / ((1.0 + std::abs(theta)) * (1.0 + std::abs(theta))); }
  double max_density() const { return 1.0 / ((1.0 - std::abs(theta)) * (1.0 - std::abs(theta))); }
};

namespace detail {

inline double bin_frequency(Index q, Index N) {
  return static_cast<double>(q) / static_cast<double>(N);
}

}  // namespace detail

// (B+1)^{-1} sum_b h_i conj(h_j) xi_eps_i conj(xi_eps_j) at nu + b/N, from the
// innovation panel with every DFT value computed by its own sum.
inline Complex bartlett_approx(const TimeSeriesPanel& innovations, std::span<const double> thetas,
                               Index i, Index j, Index bin, int B) {
  const Index N = innovations.num_samples();
  const TransferFunction hi{thetas[static_cast<std::size_t>(i)]};
  const TransferFunction hj{thetas[static_cast<std::size_t>(j)]};
  Complex acc(0.0, 0.0);
  for (int b = -B / 2; b <= B / 2; ++b) {
    const double nu = detail::bin_frequency(bin + b, N);
    acc += hi.h(nu) * std::conj(hj.h(nu)) * detail::dft_at(innovations.series(i), bin + b) *
           std::conj(detail::dft_at(innovations.series(j), bin + b));
  }
  return acc / (static_cast<double>(B) + 1.0);
}

// All pairs at once: Z Z^* / (B+1) with Z(m, b) = h_m(nu_b) xi_eps_m(nu_b).
inline ComplexMatrix bartlett_approx_matrix(const DftTable& innovation_dft,
                                            std::span<const double> thetas, Index bin, int B) {
  const Index M = innovation_dft.num_series();
  const Index N = innovation_dft.num_samples();
  ComplexMatrix Z = smoothing_window(innovation_dft, bin, B);
  for (int b = -B / 2; b <= B / 2; ++b) {
    const double nu = detail::bin_frequency(bin + b, N);
    for (Index m = 0; m < M; ++m) {
      Z(m, b + B / 2) *= TransferFunction{thetas[static_cast<std::size_t>(m)]}.h(nu);
    }
  }
  return gram_hermitian(Z);
}

// sigma^2_ij(nu) = (B+1)^{-1} sum_b s_i(nu + b/N) s_j(nu + b/N).
inline double sigma_sq(double theta_i, double theta_j, Index bin, Index N, int B) {
  const TransferFunction si{theta_i};
  const TransferFunction sj{theta_j};
  double acc = 0.0;
  for (int b = -B / 2; b <= B / 2; ++b) {
    const double nu = detail::bin_frequency(bin + b, N);
    acc += si.spectral_density(nu) * sj.spectral_density(nu);
  }
  return acc / (static_cast<double>(B) + 1.0);
}

struct BartlettGapReport {
  double numerator_gap = 0.0;    // sqrt(B+1) max |s_hat_ij - s_tilde_ij|
  double denominator_gap = 0.0;  // max |s_hat_i s_hat_j - sigma^2_ij|
  Index N = 0;
  int B = 0;
  Index M = 0;
};

// Simulates one H0 panel together with its innovations and measures how far
// the smoothed estimates sit from their linearized counterparts over all
// pairs i < j and test-grid frequencies.
inline BartlettGapReport bartlett_gap_report(const Ar1Simulator& simulator, Index N, int B,
                                             const RngStream& stream, const FftPlan& plan) {
  const Ar1Spec& spec = simulator.spec();
  if (spec.variant != Ar1Variant::H0) {
    throw InvalidInput("Bartlett gap report needs a diagonal H0 model");
  }
  const Index M = spec.M;
  if (M < 2) throw InvalidInput("Bartlett gap report needs M >= 2");
  const SimulatedPath path = simulator.simulate_with_innovations(N, stream);
  const DftTable y_dft = normalized_dft(path.observations, plan);
  const DftTable e_dft = normalized_dft(path.innovations, plan);
  const std::vector<double> thetas(static_cast<std::size_t>(M), spec.theta);
  const FrequencyGrid grid = build_test_grid(N, B);

  BartlettGapReport report{0.0, 0.0, N, B, M};
  double numerator = 0.0;
  for (Index g = 0; g < grid.size(); ++g) {
    const Index bin = grid.bin(g);
    const ComplexMatrix S = smoothed_spectral_matrix(y_dft, bin, B).S;
    const ComplexMatrix T = bartlett_approx_matrix(e_dft, thetas, bin, B);
    const double sigma2 = sigma_sq(spec.theta, spec.theta, bin, N, B);
    for (Index i = 0; i < M; ++i) {
      for (Index j = i + 1; j < M; ++j) {
        numerator = std::max(numerator, std::abs(S(i, j) - T(i, j)));
        report.denominator_gap = std::max(
            report.denominator_gap, std::abs(S(i, i).real() * S(j, j).real() - sigma2));
      }
    }
  }
  report.numerator_gap = std::sqrt(static_cast<double>(B) + 1.0) * numerator;
  return report;
}

inline BartlettGapReport bartlett_gap_report(const Ar1Spec& spec, Index N, int B,
                                             const RngStream& stream) {
  return bartlett_gap_report(Ar1Simulator(spec), N, B, stream,
                             FftPlan(static_cast<std::size_t>(N)));
}

// Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)| between the empirical
// distribution of the samples and a continuous cdf.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 2) throw InvalidInput("ks_statistic needs at least two samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace mssc::oracle
