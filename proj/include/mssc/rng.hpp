#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace mssc {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2,
// 3", SC'11). A keyed bijection on 128-bit counters; equal (key, counter)
// always gives equal output on every platform.
class Philox4x32 {
 public:
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static counter_type generate(counter_type ctr, key_type key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Purpose tags keep draws for different roles disjoint. The upper 16 bits of
// a stream domain hold the purpose, the lower 16 bits a ladder position.
enum class StreamPurpose : std::uint32_t {
  User = 0,
  Evaluation = 1,
  Calibration = 2,
};

inline std::uint32_t stream_domain(StreamPurpose purpose, std::uint32_t slot = 0) {
  return (static_cast<std::uint32_t>(purpose) << 16) | (slot & 0xFFFFu);
}

// One replication's worth of random numbers. The draw for (series, index) is
// the Philox block at counter (index, series, replication, domain) under the
// key (seed low, seed high), so streams with different ids never overlap and
// can be evaluated in any order.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint32_t domain = 0;
  std::uint32_t replication = 0;

  Philox4x32::counter_type block(std::uint32_t series, std::uint32_t index) const {
    return Philox4x32::generate({index, series, replication, domain},
                                {static_cast<std::uint32_t>(seed),
                                 static_cast<std::uint32_t>(seed >> 32)});
  }

  // Two uniforms in (0, 1) with 53-bit resolution.
  std::array<double, 2> uniform_pair(std::uint32_t series, std::uint32_t index) const {
    const auto b = block(series, index);
    return {to_open_unit((static_cast<std::uint64_t>(b[1]) << 32) | b[0]),
            to_open_unit((static_cast<std::uint64_t>(b[3]) << 32) | b[2])};
  }

  // Standard circular complex Gaussian: real and imaginary parts are
  // independent N(0, 1/2), so E|z|^2 = 1. Box-Muller with |z|^2 = -log u.
  std::complex<double> complex_normal(std::uint32_t series, std::uint32_t index) const {
    const auto [u1, u2] = uniform_pair(series, index);
    const double radius = std::sqrt(-std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  bool operator==(const RngStream&) const = default;

 private:
  static double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }
};

}  // namespace mssc
