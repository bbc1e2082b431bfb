// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "levyfield/error.hpp"
#include "levyfield/rng.hpp"

namespace levyfield {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "fit_line needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return f;
}

RateFit fit_rate(const std::vector<double>& abscissae, const std::vector<double>& errors,
                 bool log_x) {
  require(abscissae.size() == errors.size(), "rate fit: size mismatch");
  require(abscissae.size() >= 3, "rate fit needs at least 3 points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    require(errors[i] > 0.0 && std::isfinite(errors[i]), "rate fit needs positive errors");
    require(!log_x || abscissae[i] > 0.0, "log-log rate fit needs positive abscissae");
    x.push_back(log_x ? std::log(abscissae[i]) : abscissae[i]);
    y.push_back(std::log(errors[i]));
  }
  const LineFit f = fit_line(x, y);
  RateFit r;
  r.abscissae = abscissae;
  r.errors = errors;
  r.slope = f.slope;
  r.intercept = f.intercept;
  r.r2 = f.r2;
  r.log_x = log_x;
  const boost::math::students_t t(static_cast<double>(x.size() - 2));
  const double q = boost::math::quantile(boost::math::complement(t, 0.025));
  r.slope_ci_low = f.slope - q * f.slope_se;
  r.slope_ci_high = f.slope + q * f.slope_se;
  return r;
}

double Summary::std_error() const {
  return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
}

Summary summarize(const std::vector<double>& x) {
  Summary s;
  s.n = x.size();
  if (x.empty()) return s;
  // Two-pass for accuracy.
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  s.mean = m;
  s.variance = x.size() > 1 ? ss / static_cast<double>(x.size() - 1) : 0.0;
  return s;
}

ConfidenceInterval bootstrap_mean_ci(const std::vector<double>& x, std::uint64_t seed,
                                     int resamples, double level) {
  require(!x.empty(), "bootstrap needs at least one value");
  require(resamples >= 10 && level > 0.0 && level < 1.0, "invalid bootstrap settings");
  const std::size_t n = x.size();
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    Stream rng(seed, StreamTag::kBootstrap, static_cast<std::uint64_t>(b));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      acc += x[std::min(idx, n - 1)];
    }
    means[static_cast<std::size_t>(b)] = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double a = 0.5 * (1.0 - level);
  auto pick = [&](double p) {
    const double pos = p * (resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - lo) * (means[hi] - means[lo]);
  };
  return {pick(a), pick(1.0 - a)};
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "correlation needs paired samples");
  const Summary sx = summarize(x), sy = summarize(y);
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) c += (x[i] - sx.mean) * (y[i] - sy.mean);
  c /= static_cast<double>(x.size() - 1);
  const double den = std::sqrt(sx.variance * sy.variance);
  return den > 0.0 ? c / den : 0.0;
}

}  // namespace levyfield
