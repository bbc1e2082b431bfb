// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "levyfield/error.hpp"
#include "fft.hpp"
#include "levyfield/matern.hpp"

namespace levyfield {
namespace {

constexpr double kPi = std::numbers::pi;

// Sum over the spectral images xi + Omega q of the Fourier transform, with the
// images beyond |q| > N replaced by a continuum tail.
double aliased_1d(const MaternKernel& k, double xi, double omega, int n) {
  double s = 0.0;
  for (int q = -n; q <= n; ++q) s += matern_spectrum(k, xi + omega * q);
  const double e = 1.0 - 2.0 * k.alpha;
  const double yp = xi + (n + 0.5) * omega;
  const double ym = (n + 0.5) * omega - xi;
  s += (std::pow(yp, e) + std::pow(ym, e)) / (omega * (2.0 * k.alpha - 1.0));
  return s;
}

double aliased_2d(const MaternKernel& k, double x1, double x2, double omega,
                  int n) {
  double s = 0.0;
  for (int q1 = -n; q1 <= n; ++q1) {
    const double a = x1 + omega * q1;
    for (int q2 = -n; q2 <= n; ++q2) {
      const double b = x2 + omega * q2;
      s += std::pow(a * a + b * b + k.m * k.m, -k.alpha);
    }
  }
  // Equal-area disk replaces the square of retained images.
  const double rho = (2 * n + 1) * omega / std::sqrt(kPi);
  s += 2.0 * kPi * std::pow(rho, 2.0 - 2.0 * k.alpha) /
       (omega * omega * (2.0 * k.alpha - 2.0));
  return s;
}

}  // namespace

SpectralGridResult eval_grid_spectral(const MaternKernel& k,
                                      const KernelGrid& grid,
                                      const SpectralOptions& opts) {
  k.validate();
  require(grid.n >= 0 && grid.h > 0.0, "spectral grid needs n >= 0 and h > 0");
  const double peak = matern_peak(k);
  const double radius = grid.n * grid.h;
  const double pad = decay_radius(k, opts.pad_tol * peak) + 1.0 / k.m;
  const int min_points = static_cast<int>(std::ceil(2.0 * (radius + pad) / grid.h));
  const int M = fft_size_at_least(std::max(min_points, 2 * grid.n + 2));
  const double L = M * grid.h;
  const double omega = 2.0 * kPi / grid.h;
  const double dxi = 2.0 * kPi / L;
  auto freq = [M, dxi](int j) { return dxi * (j <= M / 2 ? j : j - M); };

  SpectralGridResult out;
  out.period_points = M;
  const int side = 2 * grid.n + 1;
  if (k.d == 1) {
    const int half = M / 2 + 1;
    std::vector<std::complex<double>> spec(half);
    for (int j = 0; j < half; ++j) {
      spec[j] = aliased_1d(k, freq(j), omega, opts.alias_terms_1d) / L;
    }
    std::vector<double> real(M);
    fft_c2r_1d(M, spec, real);
    out.values.resize(side);
    for (int i = -grid.n; i <= grid.n; ++i) {
      out.values[i + grid.n] = real[(i + M) % M];
    }
  } else {
    require(k.alpha > 1.0, "2D spectral grid requires alpha > 1");
    const int half = M / 2 + 1;
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(M) * half);
    for (int j1 = 0; j1 < M; ++j1) {
      for (int j2 = 0; j2 < half; ++j2) {
        spec[static_cast<std::size_t>(j1) * half + j2] =
            aliased_2d(k, freq(j1), freq(j2), omega, opts.alias_terms_2d) / (L * L);
      }
    }
    std::vector<double> real(static_cast<std::size_t>(M) * M);
    fft_c2r_2d(M, M, spec, real);
    out.values.resize(static_cast<std::size_t>(side) * side);
    for (int i1 = -grid.n; i1 <= grid.n; ++i1) {
      for (int i2 = -grid.n; i2 <= grid.n; ++i2) {
        out.values[static_cast<std::size_t>(i1 + grid.n) * side + (i2 + grid.n)] =
            real[static_cast<std::size_t>((i1 + M) % M) * M + (i2 + M) % M];
      }
    }
  }

  // Enforce exact even symmetry; the transform is real and even up to rounding.
  const std::size_t total = out.values.size();
  for (std::size_t a = 0; a < total / 2; ++a) {
    const double avg = 0.5 * (out.values[a] + out.values[total - 1 - a]);
    out.values[a] = out.values[total - 1 - a] = avg;
  }
  if (k.d == 2) {
    // Axis reflections (i1, i2) -> (i1, -i2).
    for (int i1 = 0; i1 < side; ++i1) {
      for (int i2 = 0; i2 < grid.n; ++i2) {
        double& a = out.values[static_cast<std::size_t>(i1) * side + i2];
        double& b = out.values[static_cast<std::size_t>(i1) * side + (side - 1 - i2)];
        a = b = 0.5 * (a + b);
      }
    }
  }

  for (std::size_t idx = 0; idx < total; ++idx) {
    double r;
    if (k.d == 1) {
      r = std::abs((static_cast<int>(idx) - grid.n) * grid.h);
    } else {
      const int i1 = static_cast<int>(idx) / side - grid.n;
      const int i2 = static_cast<int>(idx) % side - grid.n;
      r = grid.h * std::hypot(i1, i2);
    }
    out.max_mismatch =
        std::max(out.max_mismatch, std::abs(out.values[idx] - matern_eval(k, r)) / peak);
  }
  if (opts.check && out.max_mismatch > opts.tolerance) {
    std::ostringstream os;
    os << "spectral kernel grid mismatch " << out.max_mismatch
       << " exceeds tolerance " << opts.tolerance
       << " (aliasing: increase padding or alias terms)";
    fail(ErrorCode::kDomain, os.str());
  }
  return out;
}

}  // namespace levyfield
