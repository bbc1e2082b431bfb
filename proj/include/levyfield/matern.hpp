// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace levyfield {

/// Matérn kernel k_{alpha,m} on R^d: the inverse Fourier transform of
/// (|xi|^2 + m^2)^{-alpha}, normalized so that k(x) = (2 pi)^{-d} int e^{i xi x}
/// (|xi|^2 + m^2)^{-alpha} d xi.
struct MaternKernel {
  double alpha = 1.0;
  double m = 1.0;
  int d = 1;

  void validate() const;
  /// Bessel order alpha - d/2.
  double order() const { return alpha - 0.5 * d; }
};

/// Modified Bessel function of the second kind K_v(z), z > 0, v >= 0.
double bessel_k(double v, double z);

/// k(r) for r >= 0 (radial argument); r = 0 gives the exact limit.
double matern_eval(const MaternKernel& k, double r);

/// k(0) = Gamma(alpha - d/2) m^{d - 2 alpha} / (2^d pi^{d/2} Gamma(alpha)).
double matern_peak(const MaternKernel& k);

/// Fourier transform (|xi|^2 + m^2)^{-alpha}.
double matern_spectrum(const MaternKernel& k, double xi_norm);

/// sigma2 * k_{2 alpha, m}(r): covariance of the smoothed white noise.
double covariance(const MaternKernel& k, double sigma2, double r);

/// 2^{1-eta} (2 pi)^{-d} int |xi|^eta (|xi|^2 + m^2)^{-alpha} d xi.
/// Requires 0 < eta <= 1 and eta < 2 alpha - d.
double holder_constant(const MaternKernel& k, double eta);

/// Smallest r with k(r') <= tol for every r' >= r.
double decay_radius(const MaternKernel& k, double tol);

/// int_0^inf r^p k(r) dr.
double radial_moment(const MaternKernel& k, int p);

/// int_{R^d} k(x) dx = m^{-2 alpha}.
double matern_total_integral(const MaternKernel& k);

/// Symmetric lattice of offsets i * h, i in [-n, n]^d, row-major with the
/// last axis fastest.
struct KernelGrid {
  int n = 0;
  double h = 0.0;

  std::size_t size(int d) const;
};

struct SpectralOptions {
  double tolerance = 1e-6;    // max |spectral - eval| / k(0)
  double pad_tol = 1e-8;      // padding radius uses decay_radius(k, pad_tol * k(0))
  int alias_terms_1d = 64;
  int alias_terms_2d = 6;
  bool check = true;
};

struct SpectralGridResult {
  std::vector<double> values;
  double max_mismatch = 0.0;  // max |spectral - eval| / k(0)
  int period_points = 0;      // FFT length per axis
};

/// Kernel values on a KernelGrid from a discrete inverse Fourier transform of
/// the aliased spectrum on a padded periodic frequency lattice. Throws
/// Error(kDomain) when the mismatch against matern_eval exceeds the tolerance.
SpectralGridResult eval_grid_spectral(const MaternKernel& k,
                                      const KernelGrid& grid,
                                      const SpectralOptions& opts = {});

}  // namespace levyfield
