// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "levyfield/experiments.hpp"

namespace levyfield {

/// 17 significant digits, '.' decimal point, "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_double(double v);

/// In-memory CSV table with a header row. Cells containing a comma, quote or
/// newline are quoted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  CsvTable& row();
  CsvTable& add(double v);
  CsvTable& add(long long v);
  CsvTable& add(int v) { return add(static_cast<long long>(v)); }
  CsvTable& add(std::size_t v) { return add(static_cast<long long>(v)); }
  CsvTable& add(const std::string& v);
  CsvTable& add(const char* v) { return add(std::string(v)); }

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Study tables.
CsvTable moments_table(const MomentStudyResult& r);
CsvTable moment_norms_table(const MomentStudyResult& r);
CsvTable tails_table(const TailStudyResult& r);
CsvTable cutoff_table(const CutoffStudyResult& r);
CsvTable cutoff_samples_table(const CutoffStudyResult& r);
CsvTable kl_table(const KlStudyResult& r);
CsvTable kl_samples_table(const KlStudyResult& r);
struct NamedFit {
  std::string name;
  RateFit fit;
};
CsvTable fits_table(const std::vector<NamedFit>& fits);
CsvTable spectrum_table(const MercerBasis& basis);
CsvTable decay_table(const DecayReport& report);
CsvTable field_table(const FieldRealization& fr);
CsvTable solution_table(const FemSolution& sol, const std::vector<double>& field,
                        const std::vector<double>& coefficient);

// SVG plots. Output carries no timestamps or other run-dependent metadata.
struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;  // false draws a polyline
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts);
/// Errors as markers with the fitted line of `fit`.
std::string svg_rate_plot(const RateFit& fit, const PlotOptions& opts);
/// Cell-colored image of values on an (nx + 1) x (ny + 1) vertex lattice
/// (row-major, y fastest).
std::string svg_heatmap(const std::vector<double>& values, int nx, int ny,
                        const PlotOptions& opts);

}  // namespace levyfield
