// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "levyfield/error.hpp"
#include "levyfield/rng.hpp"
#include "levyfield/stats.hpp"

namespace levyfield {
namespace {

const Box kUnit = Box::interval(0.0, 1.0);

TEST(Partitions, BellNumbers) {
  const std::vector<std::size_t> bell = {1, 2, 5, 15, 52, 203, 877, 4140};
  for (int n = 1; n <= 8; ++n) EXPECT_EQ(enumerate_partitions(n).size(), bell[n - 1]);
  EXPECT_THROW(enumerate_partitions(0), Error);
  EXPECT_THROW(enumerate_partitions(9), Error);
}

TEST(Partitions, BlocksCoverEachElementOnce) {
  std::set<std::vector<std::vector<int>>> seen;
  for (const auto& p : enumerate_partitions(5)) {
    std::vector<int> hit(5, 0);
    for (const auto& b : p.blocks) {
      ASSERT_FALSE(b.empty());
      for (int e : b) ++hit[e];
    }
    for (int h : hit) EXPECT_EQ(h, 1);
    EXPECT_TRUE(seen.insert(p.blocks).second);
  }
}

TEST(Cumulants, GaussianAndDiscrete) {
  const auto c = cumulants({0.5, 2.0, JumpMeasure::discrete({{2.0, 1.5}})}, 4);
  // Jump moments above the unit ball enter c_1; b_n = int s^n nu for n >= 2.
  EXPECT_NEAR(c[1], 0.5 + 3.0, 1e-12);
  EXPECT_NEAR(c[2], 2.0 + 6.0, 1e-12);
  EXPECT_NEAR(c[3], 12.0, 1e-12);
  EXPECT_NEAR(c[4], 24.0, 1e-12);
}

TEST(MixedMoment, GaussianFourthMoment) {
  const CellGrid grid{kUnit, {10, 1}};
  std::vector<double> f(10);
  for (int i = 0; i < 10; ++i) f[i] = std::sin(1.0 + i);
  double norm2 = 0.0;
  for (double v : f) norm2 += 0.1 * v * v;
  const double s2 = 1.7;
  const double m4 = mixed_moment({0.0, s2, JumpMeasure::null()}, grid, {f, f, f, f});
  EXPECT_NEAR(m4, 3.0 * std::pow(s2 * norm2, 2), 1e-12);
  EXPECT_NEAR(mixed_moment({0.0, s2, JumpMeasure::null()}, grid, {f, f, f}), 0.0, 1e-14);
}

TEST(MixedMoment, PoissonMomentsOfUnitJumps) {
  // Z(1_Lambda) is Poisson with mean |Lambda| = 2.
  const CellGrid grid{Box::interval(0.0, 2.0), {4, 1}};
  const std::vector<double> one(4, 1.0);
  const LevyTriplet t{1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})};
  EXPECT_NEAR(mixed_moment(t, grid, {one}), 2.0, 1e-12);
  EXPECT_NEAR(mixed_moment(t, grid, {one, one}), 6.0, 1e-12);
  EXPECT_NEAR(mixed_moment(t, grid, {one, one, one}), 22.0, 1e-12);
  EXPECT_NEAR(mixed_moment(t, grid, {one, one, one, one}), 94.0, 1e-12);
}

TEST(MixedMoment, MatchesMonteCarlo) {
  const CellGrid grid{kUnit, {8, 1}};
  std::vector<double> f(8), g(8);
  for (int i = 0; i < 8; ++i) {
    f[i] = 1.0 + 0.1 * i;
    g[i] = i < 4 ? 1.0 : -0.5;
  }
  const std::vector<LevyTriplet> triplets = {
      {0.3, 1.0, JumpMeasure::null()},
      {1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})},
      {0.0, 0.5, JumpMeasure::bigamma(1.0, 2.0)},
  };
  for (const auto& t : triplets) {
    NoiseSampler sampler(t, grid);
    const std::size_t n = 40000;
    std::vector<double> m2(n), m3(n);
    for (std::size_t s = 0; s < n; ++s) {
      const auto z = sampler.sample(derive_seed(77, s));
      const double a = apply_functional(z, f);
      const double b = apply_functional(z, g);
      m2[s] = a * b;
      m3[s] = a * a * b;
    }
    const auto s2 = summarize(m2);
    const auto s3 = summarize(m3);
    EXPECT_NEAR(s2.mean, mixed_moment(t, grid, {f, g}), 4.0 * s2.std_error());
    EXPECT_NEAR(s3.mean, mixed_moment(t, grid, {f, f, g}), 4.0 * s3.std_error());
  }
}

TEST(MixedMoment, RejectsMismatchedLength) {
  const CellGrid grid{kUnit, {8, 1}};
  EXPECT_THROW(mixed_moment({0.0, 1.0, JumpMeasure::null()}, grid, {std::vector<double>(7)}), Error);
}

TEST(SmoothedCovariance, MatchesKernelOfDoubledOrder) {
  const MaternKernel k{1.0, 1.0, 1};
  const MaternKernel k2{2.0, 1.0, 1};
  const LevyTriplet t{0.0, 0.5, JumpMeasure::discrete({{2.0, 0.25}})};
  for (double r : {0.0, 0.3, 1.0, 2.5}) {
    EXPECT_NEAR(smoothed_covariance(t, k, r), 1.5 * matern_eval(k2, r), 1e-12);
  }
}

TEST(Talagrand, ReferenceValue) {
  EXPECT_NEAR(talagrand_bound(1.0, 1.0, 1.0, 1.0, 2.0), 2.0 * std::exp(-2.0), 1e-12);
  EXPECT_NEAR(talagrand_bound(1.0, 1.0, 1.0, 1.0, 2.0), 0.2707, 1e-4);
}

TEST(Talagrand, DecreasingInThreshold) {
  double prev = 1e300;
  for (double g = 2.0; g <= 8.0; g += 0.5) {
    const double b = talagrand_bound(1.0, 1.0, 1.0, 1.0, g);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(Talagrand, LargerSigmaGivesLargerBound) {
  EXPECT_GT(talagrand_bound(2.0, 2.0, 1.0, 1.0, 5.0), talagrand_bound(1.0, 2.0, 1.0, 1.0, 5.0));
}

TEST(Talagrand, BelowThresholdIsDomainError) {
  try {
    talagrand_bound(1.0, 1.0, 1.0, 1.0, 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
  EXPECT_EQ(talagrand_threshold(1.0, 4.0), 3.0);
}

TEST(Talagrand, ParametersAndCalibration) {
  const MaternKernel k{1.0, 1.0, 1};
  const auto p = talagrand_parameters(2.0, k, 0.5, kUnit);
  EXPECT_NEAR(p.sigma_bar, std::sqrt(2.0 * matern_peak({2.0, 1.0, 1})), 1e-12);
  EXPECT_EQ(p.v, 4.0);
  EXPECT_GE(p.A, p.sigma_bar);
  const double g0 = talagrand_threshold(p.sigma_bar, p.v);
  const std::vector<double> g = {0.5 * g0, g0, 1.2 * g0, 1.5 * g0};
  const std::vector<double> emp = {0.9, 0.05, 0.01, 0.0};
  const double K = calibrate_talagrand_k(p, g, emp);
  ASSERT_GT(K, 0.0);
  double tightest = 1e300;
  for (std::size_t i = 1; i < 3; ++i) {
    const double b = talagrand_bound(p.sigma_bar, p.A, p.v, K, g[i]);
    EXPECT_GE(b, emp[i] * (1.0 - 1e-9));
    tightest = std::min(tightest, b / emp[i]);
  }
  EXPECT_NEAR(tightest, 1.0, 1e-9);
  EXPECT_EQ(calibrate_talagrand_k(p, {0.1}, {0.5}), 0.0);
}

TEST(Chernov, ReferenceValue) {
  const auto nu = JumpMeasure::discrete({{2.0, 1.0}});
  EXPECT_NEAR(chernov_bound(nu, 1.0, 1.0, 1.0, 0.5, 10.0),
              std::exp(2.0 * std::exp(1.0) - 5.0), 1e-12);
}

TEST(Chernov, VanishesForLargeThresholds) {
  const auto nu = JumpMeasure::gamma(1.0, 4.0);
  EXPECT_LT(chernov_bound(nu, 2.0, 1.5, 1.0, 0.5, 1e4), 1e-300);
  double prev = std::numeric_limits<double>::infinity();
  for (double p = 0.0; p <= 50.0; p += 5.0) {
    const double lb = chernov_log_bound(nu, 2.0, 1.5, 1.0, 0.5, p);
    EXPECT_LT(lb, prev);
    prev = lb;
  }
}

TEST(Chernov, BlowsUpAsTauApproachesOne) {
  const auto nu = JumpMeasure::gamma(1.0, 4.0);
  const double a = chernov_log_bound(nu, 2.0, 1.5, 1.0, 1.0 - 1e-3, 10.0);
  const double b = chernov_log_bound(nu, 2.0, 1.5, 1.0, 1.0 - 1e-6, 10.0);
  EXPECT_GT(b, a + 100.0);
  EXPECT_THROW(chernov_bound(nu, 2.0, 1.5, 1.0, 1.0, 10.0), Error);
}

TEST(Chernov, DivergesAtExponentialMomentLimit) {
  try {
    chernov_bound(JumpMeasure::gamma(1.0, 4.0), 4.0, 1.5, 1.0, 0.5, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
  }
}

TEST(Chernov, LogMgfClosedForms) {
  EXPECT_NEAR(log_mgf_integral(JumpMeasure::gamma(1.5, 4.0), 1.0), 1.5 * std::log(4.0 / 3.0), 1e-12);
  EXPECT_NEAR(log_mgf_integral(JumpMeasure::discrete({{-2.0, 0.5}}), 1.0), 0.5 * std::expm1(2.0), 1e-12);
  EXPECT_EQ(log_mgf_integral(JumpMeasure::null(), 3.0), 0.0);
}

TEST(Envelope, OneDimensionalClosedForm) {
  // kappa_1 = |D| k(0) + 2 int_0^inf k = k(0) + m^{-2 alpha}.
  const MaternKernel k{1.0, 2.0, 1};
  const auto e = kernel_envelope(k, kUnit);
  EXPECT_NEAR(e.kappa_inf, matern_peak(k), 1e-14);
  EXPECT_NEAR(e.kappa1, matern_peak(k) + std::pow(2.0, -2.0), 1e-8);
}

TEST(Envelope, LegendreBoundDecreasesInThreshold) {
  const MaternKernel k{1.0, 1.0, 1};
  const auto nu = JumpMeasure::discrete({{1.0, 1.0}});
  double prev = 1.0;
  for (double p : {1.0, 2.0, 4.0, 8.0}) {
    const double b = chernov_legendre_bound(nu, k, kUnit, p);
    EXPECT_LE(b, prev);
    EXPECT_GE(b, 0.0);
    prev = b;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(SupTail, NonincreasingAndCapped) {
  const MaternKernel k{1.0, 1.0, 1};
  const std::vector<LevyTriplet> triplets = {
      {0.0, 1.0, JumpMeasure::null()},
      {1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})},
      {0.0, 1.0, JumpMeasure::gamma(1.0, 4.0)},
  };
  for (const auto& t : triplets) {
    const SupTailBound b(t, k, kUnit);
    double prev = 0.0;
    for (double j = 0.0; j <= 20.0; j += 0.5) {
      const double lb = b.log_bound(j);
      EXPECT_LE(lb, 0.0);
      EXPECT_LE(lb, prev + 1e-12);
      prev = lb;
    }
  }
  EXPECT_TRUE(std::isinf(SupTailBound(triplets[0], k, kUnit).exponential_rate()));
  EXPECT_TRUE(std::isfinite(SupTailBound(triplets[2], k, kUnit).exponential_rate()));
}

TEST(Series, SingleTermTail) {
  const auto T = TransformSpec::exp();
  const auto tail = [](double j) { return j < 1.0 ? 1.0 : 0.0; };
  const auto s = moment_series_bound(T, 2, tail, std::numeric_limits<double>::infinity(), 1.0, 1.1);
  EXPECT_NEAR(s.value, 1.21 * 2.0 * 2.0 * std::exp(4.0), 1e-9 * s.value);
  EXPECT_NEAR(s.prefactor, 1.21 * 2.0 * 2.0, 1e-12);
}

TEST(Series, RefusesWhenGrowthBeatsTailRate) {
  const auto T = TransformSpec::exp();
  const auto tail = [](double j) { return std::exp(-3.0 * j); };
  EXPECT_NO_THROW(moment_series_bound(T, 1, tail, 3.0, 1.0, 1.0));
  try {
    moment_series_bound(T, 2, tail, 3.0, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
  }
}

TEST(Series, GammaNoiseRefusesAtFourthMoment) {
  const MaternKernel k{1.0, 1.0, 1};
  const SupTailBound tail({0.0, 0.0, JumpMeasure::gamma(1.0, 4.0)}, k, kUnit);
  const auto T = TransformSpec::exp();
  double prev = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto s = moment_series_bound(T, n, tail, 1.0, 1.1);
    EXPECT_TRUE(std::isfinite(s.value));
    EXPECT_GT(s.value, prev);
    prev = s.value;
  }
  EXPECT_THROW(moment_series_bound(T, 4, tail, 1.0, 1.1), Error);
}

TEST(Series, GaussianBoundFiniteAndGrowsWithVariance) {
  const MaternKernel k{1.0, 1.0, 1};
  const auto T = TransformSpec::exp();
  double prev = 0.0;
  for (double s2 : {0.5, 1.0, 2.0}) {
    const SupTailBound tail({0.0, s2, JumpMeasure::null()}, k, kUnit);
    const auto s = moment_series_bound(T, 1, tail, 1.0, 1.1);
    EXPECT_TRUE(std::isfinite(s.value));
    EXPECT_GT(s.value, prev);
    prev = s.value;
  }
}

TEST(Series, TemperedTransformAllowsAllOrders) {
  const MaternKernel k{1.0, 1.0, 1};
  const SupTailBound tail({0.0, 0.0, JumpMeasure::gamma(1.0, 4.0)}, k, kUnit);
  const auto T = TransformSpec::tempered_exp(0.5, 1.0);
  for (int n = 1; n <= 6; ++n) EXPECT_TRUE(std::isfinite(moment_series_bound(T, n, tail, 1.0, 1.1).value));
}

}  // namespace
}  // namespace levyfield
