// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace levyfield {

/// Least-squares line through (log x, log y) with R^2 and a 95% t interval
/// for the slope.
struct RateFit {
  std::vector<double> abscissae;
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_ci_low = 0.0;
  double slope_ci_high = 0.0;
  bool log_x = true;  // false: fit log y against x (exponential rates)
};

/// Fits log(errors) against log(abscissae) (or against abscissae when
/// log_x is false). Requires at least 3 points and positive errors.
RateFit fit_rate(const std::vector<double>& abscissae, const std::vector<double>& errors,
                 bool log_x = true);

/// Ordinary least squares y = a + b x. Returns {b, a, r2, slope standard error}.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error() const;
};
Summary summarize(const std::vector<double>& x);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

/// Percentile bootstrap interval of the mean (level 0.95 by default).
ConfidenceInterval bootstrap_mean_ci(const std::vector<double>& x, std::uint64_t seed,
                                     int resamples = 1000, double level = 0.95);

/// Sample Pearson correlation.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace levyfield
