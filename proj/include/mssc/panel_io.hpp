#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mssc/errors.hpp"
#include "mssc/panel.hpp"

namespace mssc {

// ---------------------------------------------------------------------------
// CSV: one header row "series_1_re,series_1_im,...,series_M_re,series_M_im"
// followed by one row per time index. Values use 17 significant digits, which
// round-trips IEEE doubles.
// ---------------------------------------------------------------------------

inline void write_panel_csv(std::ostream& os, const TimeSeriesPanel& panel) {
  const Index M = panel.num_series();
  const Index N = panel.num_samples();
  for (Index m = 0; m < M; ++m) {
    if (m > 0) os << ',';
    os << "series_" << (m + 1) << "_re,series_" << (m + 1) << "_im";
  }
  os << '\n';
  char buf[64];
  for (Index n = 0; n < N; ++n) {
    for (Index m = 0; m < M; ++m) {
      const Complex z = panel(m, n);
      if (m > 0) os << ',';
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", z.real(), z.imag());
      os << buf;
    }
    os << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline TimeSeriesPanel read_panel_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw InvalidInput("CSV panel: missing header row");
  ++line_no;
  const auto header = detail::split_csv(detail::trim(line));
  if (header.size() < 2 || header.size() % 2 != 0) {
    throw InvalidInput("CSV panel: header must list re/im column pairs, got " +
                       std::to_string(header.size()) + " columns");
  }
  const Index M = static_cast<Index>(header.size() / 2);
  for (Index m = 0; m < M; ++m) {
    const std::string re = "series_" + std::to_string(m + 1) + "_re";
    const std::string im = "series_" + std::to_string(m + 1) + "_im";
    if (detail::trim(header[2 * m]) != re || detail::trim(header[2 * m + 1]) != im) {
      throw InvalidInput("CSV panel: header column " + std::to_string(2 * m + 1) +
                         " should be '" + re + "'");
    }
  }

  std::vector<Complex> values;
  Index rows = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::split_csv(trimmed);
    if (static_cast<Index>(fields.size()) != 2 * M) {
      throw InvalidInput("CSV panel: row " + std::to_string(line_no) + " has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(2 * M));
    }
    double parts[2];
    for (std::size_t f = 0; f < fields.size(); ++f) {
      const std::string_view field = detail::trim(fields[f]);
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw InvalidInput("CSV panel: row " + std::to_string(line_no) + ", column " +
                           std::to_string(f + 1) + ": cannot parse '" + std::string(field) + "'");
      }
      parts[f % 2] = x;
      if (f % 2 == 1) values.emplace_back(parts[0], parts[1]);
    }
    ++rows;
  }
  if (rows == 0) throw InvalidInput("CSV panel: no data rows");

  RowComplexMatrix data(M, rows);
  for (Index n = 0; n < rows; ++n) {
    for (Index m = 0; m < M; ++m) data(m, n) = values[static_cast<std::size_t>(n * M + m)];
  }
  return TimeSeriesPanel(std::move(data));
}

// ---------------------------------------------------------------------------
// Binary: "MSSC", u32 M, u32 N, then M*N (re, im) pairs of IEEE-754 binary64,
// series by series (row-major). Everything little-endian.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof bits);
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

template <typename T>
T get_le(std::istream& is, const char* what, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof bytes)) {
    throw InvalidInput(std::string("binary panel: truncated while reading ") + what +
                       " at byte offset " + std::to_string(offset));
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

}  // namespace detail

inline constexpr char kPanelMagic[4] = {'M', 'S', 'S', 'C'};

inline void write_panel_binary(std::ostream& os, const TimeSeriesPanel& panel) {
  os.write(kPanelMagic, 4);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(panel.num_series()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(panel.num_samples()));
  for (Index m = 0; m < panel.num_series(); ++m) {
    for (Index n = 0; n < panel.num_samples(); ++n) {
      detail::put_le<double>(os, panel(m, n).real());
      detail::put_le<double>(os, panel(m, n).imag());
    }
  }
}

inline TimeSeriesPanel read_panel_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kPanelMagic, 4) != 0) {
    throw InvalidInput("binary panel: bad magic at byte offset 0 (expected \"MSSC\")");
  }
  const auto M = detail::get_le<std::uint32_t>(is, "M", 4);
  const auto N = detail::get_le<std::uint32_t>(is, "N", 8);
  if (M == 0 || N == 0) throw InvalidInput("binary panel: zero dimension in header");
  RowComplexMatrix data(M, N);
  std::size_t offset = 12;
  for (Index m = 0; m < static_cast<Index>(M); ++m) {
    for (Index n = 0; n < static_cast<Index>(N); ++n) {
      const double re = detail::get_le<double>(is, "sample", offset);
      const double im = detail::get_le<double>(is, "sample", offset + 8);
      data(m, n) = Complex(re, im);
      offset += 16;
    }
  }
  return TimeSeriesPanel(std::move(data));
}

enum class PanelFormat { Csv, Binary };

inline void write_panel(const std::string& path, const TimeSeriesPanel& panel, PanelFormat format) {
  std::ofstream os(path, format == PanelFormat::Binary ? std::ios::binary : std::ios::out);
  if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
  if (format == PanelFormat::Binary) {
    write_panel_binary(os, panel);
  } else {
    write_panel_csv(os, panel);
  }
  if (!os) throw InvalidInput("failed writing '" + path + "'");
}

inline TimeSeriesPanel read_panel(const std::string& path, PanelFormat format) {
  std::ifstream is(path, format == PanelFormat::Binary ? std::ios::binary : std::ios::in);
  if (!is) throw InvalidInput("cannot open '" + path + "'");
  return format == PanelFormat::Binary ? read_panel_binary(is) : read_panel_csv(is);
}

}  // namespace mssc
