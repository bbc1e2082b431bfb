// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>

#include "levyfield/error.hpp"

namespace levyfield {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("levyfield_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(FormatDouble, RoundTripsWithSeventeenDigits) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    const std::string s = format_double(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(FormatDouble, NonFiniteValues) {
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, HeaderRowsAndQuoting) {
  CsvTable t({"name", "value", "count"});
  t.row().add("plain").add(1.5).add(3);
  t.row().add("a,b").add(-2.0).add(std::size_t{4});
  t.row().add("say \"hi\"").add(0.25).add(5LL);
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.str(),
            "name,value,count\n"
            "plain,1.5,3\n"
            "\"a,b\",-2,4\n"
            "\"say \"\"hi\"\"\",0.25,5\n");
}

TEST(Csv, RejectsRaggedRows) {
  CsvTable t({"a", "b"});
  t.row().add(1.0);
  EXPECT_THROW(t.str(), Error);
  CsvTable u({"a"});
  EXPECT_THROW(u.add(1.0), Error);
}

TEST(Files, AtomicWriteReplacesContent) {
  const auto dir = scratch_dir("atomic");
  const std::string path = (dir / "x.csv").string();
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  EXPECT_EQ(read_file(path), "second\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);  // no temporary left behind
  EXPECT_THROW(read_file((dir / "missing").string()), Error);
  write_file_atomic((dir / "nested" / "y.csv").string(), "y");
  EXPECT_EQ(read_file((dir / "nested" / "y.csv").string()), "y");
  EXPECT_THROW(write_file_atomic((dir / "x.csv" / "z.csv").string(), "z"), Error);
}

TEST(Tables, FitsTableColumns) {
  RateFit f;
  f.slope = -2.0;
  f.intercept = 0.5;
  f.r2 = 0.99;
  const auto t = fits_table({{"field", f}});
  EXPECT_EQ(t.columns().front(), "quantity");
  EXPECT_NE(t.str().find("field,"), std::string::npos);
  EXPECT_NE(t.str().find("-2"), std::string::npos);
}

TEST(Svg, DeterministicAndWellFormed) {
  PlotOptions o;
  o.title = "errors <&>";
  o.log_y = true;
  const std::vector<PlotSeries> s = {{"a", {1.0, 2.0, 4.0}, {1.0, 0.25, 0.0625}, true}};
  const std::string a = svg_plot(s, o);
  const std::string b = svg_plot(s, o);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_NE(a.find("errors &lt;&amp;&gt;"), std::string::npos);
}

TEST(Svg, HeatmapSizeChecked) {
  PlotOptions o;
  EXPECT_NO_THROW(svg_heatmap(std::vector<double>(6, 1.0), 2, 1, o));
  EXPECT_THROW(svg_heatmap(std::vector<double>(5, 1.0), 2, 1, o), Error);
}

}  // namespace
}  // namespace levyfield
