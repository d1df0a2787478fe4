#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "mssc/fft.hpp"

namespace {

using Complex = std::complex<double>;

std::vector<Complex> naive(const std::vector<Complex>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((t * k) % n) /
                                        static_cast<double>(n));
    }
    out[k] = acc;
  }
  return out;
}

class FftLength : public ::testing::TestWithParam<std::size_t> {};

TEST_P(FftLength, MatchesDefinitionalSum) {
  const std::size_t n = GetParam();
  std::mt19937_64 gen(n);
  std::normal_distribution<double> nd;
  std::vector<Complex> x(n);
  for (auto& z : x) z = Complex(nd(gen), nd(gen));
  const auto fast = mssc::FftPlan(n).forward(x);
  const auto ref = naive(x);
  double scale = 0.0;
  for (const auto& z : ref) scale = std::max(scale, std::abs(z));
  for (std::size_t k = 0; k < n; ++k) EXPECT_LE(std::abs(fast[k] - ref[k]), 1e-11 * scale) << k;
}

INSTANTIATE_TEST_SUITE_P(Lengths, FftLength,
                         ::testing::Values(1, 2, 3, 4, 5, 7, 8, 12, 17, 64, 97, 100, 181, 316, 659,
                                           1024));

TEST(Fft, PlanRejectsWrongLength) {
  mssc::FftPlan plan(8);
  std::vector<Complex> in(7);
  std::vector<Complex> out(8);
  EXPECT_THROW(plan.forward(in, out), mssc::InvalidInput);
}

}  // namespace
