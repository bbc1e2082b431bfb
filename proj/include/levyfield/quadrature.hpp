// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace levyfield {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  unsigned max_depth = 18;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss–Kronrod (15/31) on [a, b]. Either limit may be infinite;
/// half-lines are mapped onto a finite interval by s = a + tan(theta).
/// Throws Error(kConvergence) when the error estimate exceeds
/// max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts = {});

/// Convenience: value only.
inline double quad(const std::function<double(double)>& f, double a, double b,
                   const QuadratureOptions& opts = {}) {
  return integrate(f, a, b, opts).value;
}

/// Fixed 15-point Gauss–Legendre rule on [a, b] (no adaptivity, no checks).
double gauss_legendre_15(const std::function<double(double)>& f, double a,
                         double b);

}  // namespace levyfield
