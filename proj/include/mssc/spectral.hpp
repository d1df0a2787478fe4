#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mssc/errors.hpp"
#include "mssc/fft.hpp"
#include "mssc/panel.hpp"

namespace mssc {

// Normalized DFT of every series at all Fourier frequencies k/N:
//
//   values(m, k) = N^{-1/2} sum_{n=0}^{N-1} y(m, n) exp(-2 pi i n k / N).
class DftTable {
 public:
  DftTable() = default;
  explicit DftTable(RowComplexMatrix values) : values_(std::move(values)) {}

  Index num_series() const { return values_.rows(); }
  Index num_samples() const { return values_.cols(); }
  const RowComplexMatrix& values() const { return values_; }
  const Complex& operator()(Index m, Index k) const { return values_(m, k); }

 private:
  RowComplexMatrix values_;
};

inline DftTable normalized_dft(const TimeSeriesPanel& panel, const FftPlan& plan) {
  const Index M = panel.num_series();
  const Index N = panel.num_samples();
  if (M == 0 || N == 0) throw InvalidInput("normalized_dft: empty panel");
  if (static_cast<Index>(plan.size()) != N) {
    throw InvalidInput("normalized_dft: FFT plan length " + std::to_string(plan.size()) +
                       " does not match N = " + std::to_string(N));
  }
  RowComplexMatrix out(M, N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (Index m = 0; m < M; ++m) {
    std::span<Complex> row(out.data() + m * N, static_cast<std::size_t>(N));
    plan.forward(panel.series(m), row);
    for (auto& z : row) z *= scale;
  }
  return DftTable(std::move(out));
}

inline DftTable normalized_dft(const TimeSeriesPanel& panel) {
  if (panel.num_series() == 0 || panel.num_samples() == 0) {
    throw InvalidInput("normalized_dft: empty panel");
  }
  return normalized_dft(panel, FftPlan(static_cast<std::size_t>(panel.num_samples())));
}

enum class GridKind { Fourier, Test };

// A set of Fourier bins at which spectral matrices are evaluated. Bins are
// integers in [0, N); the frequency of bin k is k / N.
class FrequencyGrid {
 public:
  FrequencyGrid(GridKind kind, Index num_samples, int smoothing_span, std::vector<Index> bins)
      : kind_(kind), n_(num_samples), span_(smoothing_span), bins_(std::move(bins)) {}

  GridKind kind() const { return kind_; }
  Index num_samples() const { return n_; }
  int smoothing_span() const { return span_; }
  const std::vector<Index>& bins() const { return bins_; }
  Index size() const { return static_cast<Index>(bins_.size()); }
  Index bin(Index g) const { return bins_[static_cast<std::size_t>(g)]; }
  double frequency(Index g) const {
    return static_cast<double>(bin(g)) / static_cast<double>(n_);
  }

 private:
  GridKind kind_;
  Index n_;
  int span_;
  std::vector<Index> bins_;
};

namespace detail {

inline void check_span(Index N, int B) {
  if (B < 0 || B % 2 != 0) {
    throw InvalidInput("smoothing span B must be a non-negative even integer, got " +
                       std::to_string(B));
  }
  if (static_cast<Index>(B) + 1 > N) {
    throw InvalidInput("smoothing span B + 1 = " + std::to_string(B + 1) +
                       " exceeds the sample size N = " + std::to_string(N));
  }
}

}  // namespace detail

// Frequencies k (B+1) / N for 0 <= k <= N / (B+1). When (B+1) divides N the
// last point is nu = 1, which is the same frequency as nu = 0 and is dropped.
inline FrequencyGrid build_test_grid(Index N, int B) {
  if (N <= 0) throw InvalidInput("build_test_grid: N must be positive");
  detail::check_span(N, B);
  const Index step = B + 1;
  std::vector<Index> bins;
  for (Index k = 0; k * step <= N; ++k) {
    if (k * step == N) break;
    bins.push_back(k * step);
  }
  return FrequencyGrid(GridKind::Test, N, B, std::move(bins));
}

inline FrequencyGrid build_fourier_grid(Index N, int B) {
  if (N <= 0) throw InvalidInput("build_fourier_grid: N must be positive");
  detail::check_span(N, B);
  std::vector<Index> bins(static_cast<std::size_t>(N));
  for (Index k = 0; k < N; ++k) bins[static_cast<std::size_t>(k)] = k;
  return FrequencyGrid(GridKind::Fourier, N, B, std::move(bins));
}

inline FrequencyGrid build_grid(GridKind kind, Index N, int B) {
  return kind == GridKind::Test ? build_test_grid(N, B) : build_fourier_grid(N, B);
}

struct SpectralMatrix {
  Index bin = 0;
  double nu = 0.0;
  int smoothing_span = 0;
  ComplexMatrix S;
};

struct CoherenceMatrix {
  Index bin = 0;
  double nu = 0.0;
  ComplexMatrix C;
};

// Columns of the DFT table at bins k + b (mod N) for b = -B/2, ..., B/2.
inline ComplexMatrix smoothing_window(const DftTable& dft, Index k, int B) {
  const Index M = dft.num_series();
  const Index N = dft.num_samples();
  detail::check_span(N, B);
  ComplexMatrix X(M, B + 1);
  for (int b = -B / 2; b <= B / 2; ++b) {
    const Index col = ((k + b) % N + N) % N;
    X.col(b + B / 2) = dft.values().col(col);
  }
  return X;
}

// S = X X^* / (B+1) for the window X at bin k, made exactly Hermitian with a
// real diagonal.
inline ComplexMatrix gram_hermitian(const ComplexMatrix& X) {
  const Index M = X.rows();
  ComplexMatrix S = ComplexMatrix::Zero(M, M);
  S.selfadjointView<Eigen::Lower>().rankUpdate(X, 1.0 / static_cast<double>(X.cols()));
  for (Index j = 0; j < M; ++j) {
    S(j, j) = Complex(S(j, j).real(), 0.0);
    for (Index i = j + 1; i < M; ++i) S(j, i) = std::conj(S(i, j));
  }
  return S;
}

inline SpectralMatrix smoothed_spectral_matrix(const DftTable& dft, Index k, int B) {
  const Index N = dft.num_samples();
  if (k < 0 || k >= N) {
    throw InvalidInput("smoothed_spectral_matrix: bin " + std::to_string(k) +
                       " outside [0, N)");
  }
  SpectralMatrix out;
  out.bin = k;
  out.nu = static_cast<double>(k) / static_cast<double>(N);
  out.smoothing_span = B;
  out.S = gram_hermitian(smoothing_window(dft, k, B));
  return out;
}

inline CoherenceMatrix coherence_matrix(const SpectralMatrix& spectral) {
  const ComplexMatrix& S = spectral.S;
  const Index M = S.rows();
  Eigen::VectorXd inv_scale(M);
  for (Index i = 0; i < M; ++i) {
    const double d = S(i, i).real();
    if (!(d > 0.0)) {
      throw DegenerateSpectrum("spectral estimate of series " + std::to_string(i) +
                               " vanishes at bin " + std::to_string(spectral.bin));
    }
    inv_scale(i) = 1.0 / std::sqrt(d);
  }
  CoherenceMatrix out;
  out.bin = spectral.bin;
  out.nu = spectral.nu;
  out.C.resize(M, M);
  for (Index j = 0; j < M; ++j) {
    for (Index i = 0; i < M; ++i) {
      out.C(i, j) = i == j ? Complex(1.0, 0.0) : S(i, j) * (inv_scale(i) * inv_scale(j));
    }
  }
  return out;
}

}  // namespace mssc
