#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "mssc/errors.hpp"

namespace mssc {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using RowComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

// Entry-wise std::isfinite. Eigen's allFinite() is not reliable for
// infinities under optimization.
template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      const auto v = x(i, j);
      if constexpr (std::is_arithmetic_v<decltype(v)>) {
        if (!std::isfinite(v)) return false;
      } else {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      }
    }
  }
  return true;
}

}  // namespace detail

// M jointly observed complex series of N samples each. Row m holds series m,
// column n holds time index n (0-based). Entries are always finite.
class TimeSeriesPanel {
 public:
  TimeSeriesPanel() = default;

  explicit TimeSeriesPanel(RowComplexMatrix data) : data_(std::move(data)) {
    if (data_.rows() == 0 || data_.cols() == 0) {
      throw InvalidInput("time series panel is empty");
    }
    for (Index m = 0; m < data_.rows(); ++m) {
      for (Index n = 0; n < data_.cols(); ++n) {
        const Complex& z = data_(m, n);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          throw InvalidInput("non-finite sample at series " + std::to_string(m) +
                             ", time " + std::to_string(n));
        }
      }
    }
  }

  Index num_series() const { return data_.rows(); }
  Index num_samples() const { return data_.cols(); }

  const RowComplexMatrix& data() const { return data_; }
  const Complex& operator()(Index m, Index n) const { return data_(m, n); }

  std::span<const Complex> series(Index m) const {
    return {data_.data() + m * data_.cols(), static_cast<std::size_t>(data_.cols())};
  }

  bool operator==(const TimeSeriesPanel& other) const {
    return data_.rows() == other.data_.rows() && data_.cols() == other.data_.cols() &&
           data_ == other.data_;
  }

 private:
  RowComplexMatrix data_;
};

}  // namespace mssc
