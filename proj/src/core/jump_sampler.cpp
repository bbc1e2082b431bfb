// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

// Boost 1.74 pchip.hpp calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>

#include "levyfield/error.hpp"
#include "levyfield/measure.hpp"
#include "levyfield/quadrature.hpp"

namespace levyfield {

struct JumpSampler::Table {
  boost::math::interpolators::pchip<std::vector<double>> inverse;
  double mass_lo;
  double mass_hi;
};

namespace {

// Upper cut s_hi of the continuous table: the mass beyond s_hi is bounded by
// c v e^{-w s}/(w s) and is made negligible against the total.
double tail_cut(const JumpMeasure& nu, double threshold, double total) {
  const double c = nu.kind() == JumpMeasure::Kind::kBigamma ? 2.0 : 1.0;
  const double v = nu.intensity();
  const double w = nu.decay();
  double s = std::max(2.0 * threshold, 1.0 / w);
  while (c * v * std::exp(-w * s) / (w * s) > 1e-17 * total) s *= 1.25;
  return s;
}

}  // namespace

JumpSampler::JumpSampler(const JumpMeasure& nu, double threshold, int knots)
    : nu_(nu), threshold_(threshold) {
  require(threshold > 0.0, "jump sampler threshold must be positive");
  require(knots >= 16, "jump sampler needs at least 16 table knots");
  if (nu.kind() == JumpMeasure::Kind::kDiscrete) {
    for (const auto& a : nu.atoms()) {
      if (std::abs(a.location) > threshold) sorted_.push_back(a);
    }
    std::sort(sorted_.begin(), sorted_.end(),
              [](const DiscreteAtom& x, const DiscreteAtom& y) {
                const double ax = std::abs(x.location), ay = std::abs(y.location);
                return ax != ay ? ax < ay : x.location < y.location;
              });
    cumulative_.reserve(sorted_.size());
    for (const auto& a : sorted_) {
      total_ += a.mass;
      cumulative_.push_back(total_);
    }
    return;
  }
  if (!nu.is_continuous()) return;

  const double exact_total = nu.mass_above(threshold);
  s_hi_ = tail_cut(nu, threshold, exact_total);
  const double l0 = std::log(threshold);
  const double l1 = std::log(s_hi_);
  log_knots_.resize(knots);
  knot_mass_.resize(knots);
  auto dens = [this](double s) { return nu_.abs_density(s); };
  double prev = threshold;
  double acc = 0.0;
  for (int i = 0; i < knots; ++i) {
    const double l = l0 + (l1 - l0) * i / (knots - 1);
    const double s = i == 0 ? threshold : std::exp(l);
    log_knots_[i] = i == 0 ? l0 : l;
    if (i > 0) acc += gauss_legendre_15(dens, prev, s);
    knot_mass_[i] = acc;
    prev = s;
  }
  total_ = acc;

  // Inverse table: log s as a monotone cubic in cumulative mass. Knots whose
  // mass increment underflows are dropped to keep abscissae strictly increasing.
  std::vector<double> x, y;
  x.reserve(knots);
  y.reserve(knots);
  for (int i = 0; i < knots; ++i) {
    if (!x.empty() && !(knot_mass_[i] > x.back())) continue;
    x.push_back(knot_mass_[i]);
    y.push_back(log_knots_[i]);
  }
  require(x.size() >= 4, "jump sampler table degenerated", ErrorCode::kInternal);
  const double lo = x.front(), hi = x.back();
  table_ = std::make_unique<Table>(
      Table{boost::math::interpolators::pchip<std::vector<double>>(std::move(x),
                                                                   std::move(y)),
            lo, hi});
}

JumpSampler::~JumpSampler() = default;

double JumpSampler::abs_cumulative(double s) const {
  if (!(s > threshold_)) return 0.0;
  if (!sorted_.empty() || nu_.kind() == JumpMeasure::Kind::kDiscrete) {
    auto it = std::upper_bound(
        sorted_.begin(), sorted_.end(), s,
        [](double v, const DiscreteAtom& a) { return v < std::abs(a.location); });
    const auto n = static_cast<std::size_t>(it - sorted_.begin());
    return n == 0 ? 0.0 : cumulative_[n - 1];
  }
  if (!table_) return 0.0;
  if (s >= s_hi_) return total_;
  const double l = std::log(s);
  auto it = std::upper_bound(log_knots_.begin(), log_knots_.end(), l);
  const auto i = static_cast<std::size_t>(it - log_knots_.begin()) - 1;
  const double base = i == 0 ? threshold_ : std::exp(log_knots_[i]);
  return knot_mass_[i] +
         gauss_legendre_15([this](double t) { return nu_.abs_density(t); }, base,
                           s);
}

double JumpSampler::table_inverse(double mass) const {
  require(table_ != nullptr, "table_inverse requires a continuous measure");
  const double m = std::clamp(mass, table_->mass_lo, table_->mass_hi);
  return std::exp(table_->inverse(m));
}

double JumpSampler::invert(double mass) const {
  double s = table_inverse(mass);
  for (int k = 0; k < 2; ++k) {
    const double f = abs_cumulative(s) - mass;
    const double d = nu_.abs_density(s);
    if (!(d > 0.0)) break;
    const double next = s - f / d;
    if (!(next > threshold_) || !(next < s_hi_)) break;
    s = next;
  }
  return s;
}

double JumpSampler::signed_jump(double magnitude, Stream& rng) const {
  if (nu_.kind() == JumpMeasure::Kind::kBigamma) {
    return (rng() >> 63) ? -magnitude : magnitude;
  }
  return magnitude;
}

double JumpSampler::sample(Stream& rng) const {
  require(total_ > 0.0, "cannot sample from a jump measure with zero mass");
  const double target = rng.uniform() * total_;
  if (!sorted_.empty()) {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;
    return sorted_[static_cast<std::size_t>(it - cumulative_.begin())].location;
  }
  return signed_jump(invert(target), rng);
}

double JumpSampler::sample_between(double lo, double hi, Stream& rng) const {
  require(lo >= threshold_ && hi > lo,
          "sample_between needs threshold <= lo < hi");
  const double c_lo = abs_cumulative(lo);
  const double c_hi = abs_cumulative(std::min(hi, std::numeric_limits<double>::max()));
  const double mass = c_hi - c_lo;
  require(mass > 0.0, "sample_between: empty shell");
  const double target = c_lo + rng.uniform() * mass;
  if (!sorted_.empty()) {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) --it;
    return sorted_[static_cast<std::size_t>(it - cumulative_.begin())].location;
  }
  const double s = std::clamp(invert(target), lo, std::min(hi, s_hi_));
  return signed_jump(s, rng);
}

double sample_jump(const JumpSampler& shell_sampler, Stream& rng) {
  return shell_sampler.sample(rng);
}

}  // namespace levyfield
