#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "mssc/errors.hpp"

namespace mssc {

// Forward discrete Fourier transform of a fixed length n,
//
//   X[k] = sum_{t=0}^{n-1} x[t] exp(-2 pi i t k / n),
//
// without normalization. Powers of two use an iterative radix-2 transform;
// every other length goes through Bluestein's chirp-z identity on a padded
// power-of-two transform. A plan is immutable once built and can be shared
// between threads.
class FftPlan {
 public:
  using complex_type = std::complex<double>;

  explicit FftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidInput("FFT length must be positive");
    if (is_power_of_two(n)) {
      padded_ = n;
      init_radix2();
      return;
    }
    padded_ = 1;
    while (padded_ < 2 * n - 1) padded_ <<= 1;
    init_radix2();

    // Chirp w[t] = exp(-i pi t^2 / n); t^2 is reduced modulo 2n so the angle
    // stays in [0, 2 pi) and keeps full precision for large t.
    chirp_.resize(n);
    const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n);
    for (std::size_t t = 0; t < n; ++t) {
      const std::uint64_t sq = (static_cast<std::uint64_t>(t) * t) % two_n;
      const double angle = -std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n);
      chirp_[t] = std::polar(1.0, angle);
    }
    std::vector<complex_type> kernel(padded_, complex_type(0.0, 0.0));
    kernel[0] = std::conj(chirp_[0]);
    for (std::size_t t = 1; t < n; ++t) {
      kernel[t] = std::conj(chirp_[t]);
      kernel[padded_ - t] = std::conj(chirp_[t]);
    }
    radix2(kernel);
    kernel_spectrum_ = std::move(kernel);
  }

  std::size_t size() const { return n_; }

  // in and out may alias.
  void forward(std::span<const complex_type> in, std::span<complex_type> out) const {
    if (in.size() != n_ || out.size() != n_) {
      throw InvalidInput("FFT buffer length does not match the plan");
    }
    if (chirp_.empty()) {
      std::vector<complex_type> work(in.begin(), in.end());
      radix2(work);
      std::copy(work.begin(), work.end(), out.begin());
      return;
    }
    std::vector<complex_type> work(padded_, complex_type(0.0, 0.0));
    for (std::size_t t = 0; t < n_; ++t) work[t] = mul(in[t], chirp_[t]);
    radix2(work);
    for (std::size_t k = 0; k < padded_; ++k) work[k] = std::conj(mul(work[k], kernel_spectrum_[k]));
    // Inverse transform via conjugation: ifft(x) = conj(fft(conj(x))) / L.
    radix2(work);
    const double scale = 1.0 / static_cast<double>(padded_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = mul(std::conj(work[k]) * scale, chirp_[k]);
  }

  std::vector<complex_type> forward(std::span<const complex_type> in) const {
    std::vector<complex_type> out(n_);
    forward(in, out);
    return out;
  }

 private:
  static bool is_power_of_two(std::size_t n) { return (n & (n - 1)) == 0; }

  // Plain product; std::complex operator* carries Annex G inf/nan handling.
  static complex_type mul(const complex_type& a, const complex_type& b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
  }

  void init_radix2() {
    twiddle_.resize(padded_ / 2);
    for (std::size_t k = 0; k < padded_ / 2; ++k) {
      const double angle =
          -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(padded_);
      twiddle_[k] = std::polar(1.0, angle);
    }
    bit_reverse_.resize(padded_);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < padded_) ++bits;
    for (std::size_t i = 0; i < padded_; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bit_reverse_[i] = r;
    }
  }

  // In-place transform of length padded_.
  void radix2(std::vector<complex_type>& data) const {
    const std::size_t len = padded_;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t j = bit_reverse_[i];
      if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t half = 1; half < len; half <<= 1) {
      const std::size_t stride = len / (2 * half);
      for (std::size_t start = 0; start < len; start += 2 * half) {
        for (std::size_t k = 0; k < half; ++k) {
          const complex_type u = data[start + k];
          const complex_type v = mul(data[start + k + half], twiddle_[k * stride]);
          data[start + k] = u + v;
          data[start + k + half] = u - v;
        }
      }
    }
  }

  std::size_t n_;
  std::size_t padded_ = 0;
  std::vector<complex_type> twiddle_;
  std::vector<std::size_t> bit_reverse_;
  std::vector<complex_type> chirp_;
  std::vector<complex_type> kernel_spectrum_;
};

}  // namespace mssc
