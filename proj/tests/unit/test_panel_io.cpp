#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mssc/panel_io.hpp"
#include "test_support.hpp"

namespace {

using namespace mssc;
using mssc::testing::random_panel;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mssc_io_" + name)).string();
}

TEST(PanelCsv, RoundTripIsExact) {
  const auto panel = random_panel(1, 3, 17);
  std::stringstream ss;
  write_panel_csv(ss, panel);
  EXPECT_EQ(read_panel_csv(ss), panel);
}

TEST(PanelCsv, HeaderLayout) {
  std::stringstream ss;
  write_panel_csv(ss, random_panel(1, 2, 1));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "series_1_re,series_1_im,series_2_re,series_2_im");
}

TEST(PanelCsv, MalformedRowNamesTheRow) {
  std::stringstream ss("series_1_re,series_1_im\n1,2\n3,abc\n");
  try {
    read_panel_csv(ss);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
  std::stringstream short_row("series_1_re,series_1_im\n1,2\n3\n");
  EXPECT_THROW(read_panel_csv(short_row), InvalidInput);
  std::stringstream bad_header("a,b\n1,2\n");
  EXPECT_THROW(read_panel_csv(bad_header), InvalidInput);
  std::stringstream empty("series_1_re,series_1_im\n");
  EXPECT_THROW(read_panel_csv(empty), InvalidInput);
  std::stringstream nan("series_1_re,series_1_im\nnan,0\n");
  EXPECT_THROW(read_panel_csv(nan), InvalidInput);
}

TEST(PanelBinary, RoundTripIsBitExact) {
  const auto panel = random_panel(2, 4, 33);
  const std::string path = temp_path("rt.bin");
  write_panel(path, panel, PanelFormat::Binary);
  EXPECT_EQ(std::filesystem::file_size(path), 12u + 4u * 33u * 16u);
  EXPECT_EQ(read_panel(path, PanelFormat::Binary), panel);
  std::filesystem::remove(path);
}

TEST(PanelBinary, LayoutIsLittleEndian) {
  RowComplexMatrix y(1, 1);
  y(0, 0) = Complex(1.0, -2.0);
  std::stringstream ss;
  write_panel_binary(ss, TimeSeriesPanel(y));
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 28u);
  EXPECT_EQ(bytes.substr(0, 4), "MSSC");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1);
  // 1.0 = 0x3FF0000000000000
  EXPECT_EQ(static_cast<unsigned char>(bytes[19]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[18]), 0xF0);
}

TEST(PanelBinary, TruncationReportsOffset) {
  std::stringstream ss;
  write_panel_binary(ss, random_panel(3, 2, 4));
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 5);
  std::stringstream cut(bytes);
  try {
    read_panel_binary(cut);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("offset 132"), std::string::npos) << e.what();
  }
  std::stringstream bad("XXXX");
  EXPECT_THROW(read_panel_binary(bad), InvalidInput);
}

TEST(PanelFile, MissingFile) {
  EXPECT_THROW(read_panel("/nonexistent/panel.csv", PanelFormat::Csv), InvalidInput);
}

}  // namespace
