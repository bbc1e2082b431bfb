// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "levyfield/error.hpp"

namespace levyfield {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  require(!columns_.empty(), "CsvTable: no columns");
}

CsvTable& CsvTable::row() {
  if (!rows_.empty()) {
    require(rows_.back().size() == columns_.size(), "CsvTable: incomplete row",
            ErrorCode::kInternal);
  }
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(format_double(v)); }

CsvTable& CsvTable::add(long long v) { return add(std::to_string(v)); }

CsvTable& CsvTable::add(const std::string& v) {
  require(!rows_.empty() && rows_.back().size() < columns_.size(),
          "CsvTable: cell outside the table", ErrorCode::kInternal);
  rows_.back().push_back(quote(v));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += quote(columns_[i]);
  }
  out += '\n';
  for (const auto& r : rows_) {
    require(r.size() == columns_.size(), "CsvTable: incomplete row", ErrorCode::kInternal);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += r[i];
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) fail(ErrorCode::kIo, "cannot create directory " + target.parent_path().string());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) fail(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(ErrorCode::kIo, "cannot rename " + tmp.string() + " to " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

CsvTable moments_table(const MomentStudyResult& r) {
  CsvTable t({"order", "mean", "std_error", "ci_low", "ci_high", "bound", "bound_note"});
  for (const auto& e : r.estimates) {
    t.row().add(e.order).add(e.mean).add(e.std_error).add(e.ci.low).add(e.ci.high)
        .add(e.bound).add(e.bound_note);
  }
  return t;
}

CsvTable moment_norms_table(const MomentStudyResult& r) {
  CsvTable t({"sample", "h1_norm"});
  for (std::size_t i = 0; i < r.norms.size(); ++i) t.row().add(i).add(r.norms[i]);
  return t;
}

CsvTable tails_table(const TailStudyResult& r) {
  CsvTable t({"threshold", "empirical", "empirical_gaussian", "empirical_poisson",
              "talagrand", "chernov", "chernov_legendre", "union_bound"});
  for (const auto& x : r.rows) {
    t.row().add(x.threshold).add(x.empirical).add(x.empirical_gaussian)
        .add(x.empirical_poisson).add(x.talagrand).add(x.chernov).add(x.chernov_legendre)
        .add(x.union_bound);
  }
  return t;
}

CsvTable cutoff_table(const CutoffStudyResult& r) {
  CsvTable t({"distance", "mean_field_error", "mean_solution_error"});
  for (std::size_t l = 0; l < r.distances.size(); ++l) {
    t.row().add(r.distances[l]).add(r.mean_field_errors[l]);
    t.add(l < r.mean_solution_errors.size() ? r.mean_solution_errors[l]
                                            : std::nan(""));
  }
  return t;
}

CsvTable cutoff_samples_table(const CutoffStudyResult& r) {
  CsvTable t({"sample", "level", "distance", "field_error", "solution_error"});
  for (std::size_t s = 0; s < r.field_errors.size(); ++s) {
    for (std::size_t l = 0; l < r.distances.size(); ++l) {
      t.row().add(s).add(l).add(r.distances[l]).add(r.field_errors[s][l]);
      t.add(s < r.solution_errors.size() ? r.solution_errors[s][l] : std::nan(""));
    }
  }
  return t;
}

CsvTable kl_table(const KlStudyResult& r) {
  CsvTable t({"order", "box_volume", "kappa", "mean_solution_error", "mean_field_error",
              "sensitivity_correlation", "flux_correlation", "sensitivity_ratio"});
  for (std::size_t l = 0; l < r.orders.size(); ++l) {
    t.row().add(r.orders[l]).add(r.box_volume[l]).add(r.kappa[l])
        .add(r.mean_solution_errors[l]).add(r.mean_field_errors[l]).add(r.correlation[l])
        .add(r.flux_correlation[l]).add(r.sensitivity_ratio[l]);
  }
  return t;
}

CsvTable kl_samples_table(const KlStudyResult& r) {
  CsvTable t({"sample", "order", "solution_error", "field_error", "sensitivity_bound",
              "flux_sensitivity"});
  for (std::size_t s = 0; s < r.solution_errors.size(); ++s) {
    for (std::size_t l = 0; l < r.orders.size(); ++l) {
      t.row().add(s).add(r.orders[l]).add(r.solution_errors[s][l]).add(r.field_errors[s][l])
          .add(r.sensitivity[s][l]).add(r.flux_sensitivity[s][l]);
    }
  }
  return t;
}

CsvTable fits_table(const std::vector<NamedFit>& fits) {
  CsvTable t({"quantity", "points", "log_x", "slope", "intercept", "r2", "slope_ci_low",
              "slope_ci_high"});
  for (const auto& f : fits) {
    t.row().add(f.name).add(f.fit.abscissae.size()).add(f.fit.log_x ? 1 : 0)
        .add(f.fit.slope).add(f.fit.intercept).add(f.fit.r2).add(f.fit.slope_ci_low)
        .add(f.fit.slope_ci_high);
  }
  return t;
}

CsvTable spectrum_table(const MercerBasis& basis) {
  CsvTable t({"j", "eigenvalue", "sup_abs_eigenfunction"});
  for (Eigen::Index j = 0; j < basis.eigenvalues.size(); ++j) {
    t.row().add(static_cast<long long>(j + 1)).add(basis.eigenvalues[j])
        .add(basis.eigenfunctions.col(j).cwiseAbs().maxCoeff());
  }
  return t;
}

CsvTable decay_table(const DecayReport& report) {
  CsvTable t({"j_lo", "j_hi", "slope", "intercept", "r2", "eps", "product_bound"});
  t.row().add(report.j_lo).add(report.j_hi).add(report.slope).add(report.intercept)
      .add(report.r2).add(report.eps).add(report.product_bound);
  return t;
}

CsvTable field_table(const FieldRealization& fr) {
  CsvTable t({"x", "y", "drift", "gaussian", "jump", "value"});
  for (std::size_t i = 0; i < fr.grid.size(); ++i) {
    t.row().add(fr.grid.nodes[i][0]).add(fr.grid.nodes[i][1]).add(fr.drift[i])
        .add(fr.gaussian[i]).add(fr.jump[i]).add(fr.values[i]);
  }
  return t;
}

CsvTable solution_table(const FemSolution& sol, const std::vector<double>& field,
                        const std::vector<double>& coefficient) {
  CsvTable t({"x", "y", "field", "coefficient", "u"});
  const Mesh& m = *sol.mesh;
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    t.row().add(m.vertices[i][0]).add(m.vertices[i][1]).add(field[i]).add(coefficient[i])
        .add(sol.values[i]);
  }
  return t;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr int kMarginLeft = 72;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 52;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;
  double pix_lo = 0.0, pix_hi = 1.0;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return pix_lo + (a - lo) / (hi - lo) * (pix_hi - pix_lo);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int a = static_cast<int>(std::ceil(lo - 1e-9));
      const int b = static_cast<int>(std::floor(hi + 1e-9));
      const int step = std::max(1, (b - a) / 6 + 1);
      for (int e = a; e <= b; e += step) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
      if (f * mag >= raw) {
        step = f * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
  }
};

Axis make_axis(const std::vector<double>& values, bool log, double pix_lo, double pix_hi) {
  Axis ax;
  ax.log = log;
  ax.pix_lo = pix_lo;
  ax.pix_hi = pix_hi;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!ax.usable(v)) continue;
    const double a = log ? std::log10(v) : v;
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  ax.lo = log ? std::floor(lo - pad) : lo - pad;
  ax.hi = log ? std::ceil(hi + pad) : hi + pad;
  return ax;
}

std::string frame(const PlotOptions& o, const Axis& ax, const Axis& ay) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
     << o.height << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << o.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"15\">" << escape(o.title) << "</text>\n";
  const double x0 = ax.pix_lo, x1 = ax.pix_hi, y0 = ay.pix_lo, y1 = ay.pix_hi;
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0)
     << "\" height=\"" << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double px = ax.map(t);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px)
       << "\" y2=\"" << num(y0 + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t);
    os << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x0)
       << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x0 - 8) << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << o.height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape(o.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(0.5 * (y0 + y1)) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
     << num(0.5 * (y0 + y1)) << ")\">" << escape(o.y_label) << "</text>\n";
  return os.str();
}

}  // namespace

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& o) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    require(s.x.size() == s.y.size(), "svg_plot: x and y sizes differ");
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis ax = make_axis(xs, o.log_x, kMarginLeft, o.width - kMarginRight);
  const Axis ay = make_axis(ys, o.log_y, o.height - kMarginBottom, kMarginTop);
  std::ostringstream os;
  os << frame(o, ax, ay);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
        os << "<circle cx=\"" << num(ax.map(s.x[i])) << "\" cy=\"" << num(ay.map(s.y[i]))
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
        if (!first) os << ' ';
        os << num(ax.map(s.x[i])) << ',' << num(ay.map(s.y[i]));
        first = false;
      }
      os << "\"/>\n";
    }
    const double ly = kMarginTop + 16.0 * k + 8.0;
    const double lx = o.width - kMarginRight + 12.0;
    os << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly - 5) << "\" width=\"10\" "
       << "height=\"10\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << num(lx + 15) << "\" y=\"" << num(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_rate_plot(const RateFit& fit, const PlotOptions& opts) {
  PlotSeries data{"mean error", fit.abscissae, fit.errors, true};
  PlotSeries line{"slope " + tick_label(fit.slope), {}, {}, false};
  if (!fit.abscissae.empty()) {
    const auto [lo, hi] = std::minmax_element(fit.abscissae.begin(), fit.abscissae.end());
    for (int i = 0; i <= 32; ++i) {
      const double x = *lo + (*hi - *lo) * i / 32.0;
      const double a = fit.log_x ? std::log(x) : x;
      line.x.push_back(x);
      line.y.push_back(std::exp(fit.intercept + fit.slope * a));
    }
  }
  PlotOptions o = opts;
  o.log_x = fit.log_x;
  o.log_y = true;
  return svg_plot({data, line}, o);
}

namespace {

std::string color_map(double t) {
  static const double stops[][3] = {{68, 1, 84},   {59, 82, 139},  {33, 145, 140},
                                    {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

}  // namespace

std::string svg_heatmap(const std::vector<double>& values, int nx, int ny,
                        const PlotOptions& o) {
  require(nx >= 1 && ny >= 1 &&
              values.size() == static_cast<std::size_t>(nx + 1) * (ny + 1),
          "svg_heatmap: value count does not match the lattice");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn, span = std::max(*mx - *mn, 1e-300);
  const double side = std::min(o.width - kMarginLeft - kMarginRight,
                               o.height - kMarginTop - kMarginBottom);
  const double cw = side / (nx + 1), ch = side / (ny + 1);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
     << o.height << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << o.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"15\">" << escape(o.title) << "</text>\n";
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const double v = values[static_cast<std::size_t>(i) * (ny + 1) + j];
      os << "<rect x=\"" << num(kMarginLeft + i * cw) << "\" y=\""
         << num(kMarginTop + (ny - j) * ch) << "\" width=\"" << num(cw + 0.05)
         << "\" height=\"" << num(ch + 0.05) << "\" fill=\"" << color_map((v - lo) / span)
         << "\"/>\n";
    }
  }
  const double bx = kMarginLeft + side + 20.0;
  for (int k = 0; k < 64; ++k) {
    os << "<rect x=\"" << num(bx) << "\" y=\"" << num(kMarginTop + side * (63 - k) / 64.0)
       << "\" width=\"14\" height=\"" << num(side / 64.0 + 0.05) << "\" fill=\""
       << color_map(k / 63.0) << "\"/>\n";
  }
  os << "<text x=\"" << num(bx + 20) << "\" y=\"" << num(kMarginTop + 10)
     << "\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(*mx) << "</text>\n";
  os << "<text x=\"" << num(bx + 20) << "\" y=\"" << num(kMarginTop + side)
     << "\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(*mn) << "</text>\n";
  os << "<text x=\"" << num(kMarginLeft + 0.5 * side) << "\" y=\""
     << num(kMarginTop + side + 30) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\">" << escape(o.x_label) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace levyfield
