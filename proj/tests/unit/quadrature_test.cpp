// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "levyfield/error.hpp"

namespace levyfield {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Quadrature, Polynomial) {
  EXPECT_NEAR(quad([](double x) { return x * x; }, 0.0, 3.0), 9.0, 1e-12);
}

TEST(Quadrature, HalfLine) {
  EXPECT_NEAR(quad([](double x) { return std::exp(-x); }, 0.0, kInf), 1.0, 1e-9);
}

TEST(Quadrature, WholeLine) {
  const double v = quad([](double x) { return std::exp(-x * x); }, -kInf, kInf);
  EXPECT_NEAR(v, std::sqrt(M_PI), 1e-9);
}

TEST(Quadrature, TinyIntervalKeepsRelativeAccuracy) {
  // Mass of e^{-s}/s on a shell of width ~1e-6 near s = 1e-3.
  const double a = 1.0 / 1001.0, b = 1.0 / 1000.0;
  const double v = quad([](double s) { return std::exp(-s) / s; }, a, b);
  const double ref = std::log(b / a) - (b - a) + (b * b - a * a) / 4.0 -
                     (b * b * b - a * a * a) / 18.0;
  EXPECT_NEAR(v, ref, 1e-12 * std::abs(ref) + 1e-15);
}

TEST(Quadrature, AlgebraicTailOnHalfLine) {
  EXPECT_NEAR(quad([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, kInf), M_PI / 2.0, 1e-8);
}

TEST(Quadrature, NonIntegrableThrowsConvergence) {
  try {
    quad([](double x) { return 1.0 / x; }, 0.0, 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConvergence);
  }
}

TEST(Quadrature, FixedGaussLegendreExactForDegree29) {
  const double v = gauss_legendre_15([](double x) { return std::pow(x, 28); }, -1.0, 1.0);
  EXPECT_NEAR(v, 2.0 / 29.0, 1e-14);
}

}  // namespace
}  // namespace levyfield
