// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/matern.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "levyfield/error.hpp"
#include "levyfield/quadrature.hpp"

namespace levyfield {
namespace {

constexpr double kPi = std::numbers::pi;

// K_{n+1/2}(z) = sqrt(pi/(2z)) e^{-z} sum_{k=0}^{n} (n+k)!/(k!(n-k)!) (2z)^{-k}.
double bessel_k_half_integer(int n, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= n; ++k) {
    // ratio of consecutive coefficients: (n+k)(n-k+1) / (k * 2z)
    term *= static_cast<double>(n + k) * (n - k + 1) / (2.0 * k * z);
    sum += term;
  }
  return std::sqrt(kPi / (2.0 * z)) * std::exp(-z) * sum;
}

// K_v(z) = int_0^inf exp(-z cosh t) cosh(v t) dt.
double bessel_k_integral(double v, double z) {
  auto f = [v, z](double t) {
    const double e = -z * std::cosh(t) + v * t;
    if (e < -745.0) return 0.0;
    return 0.5 * (std::exp(e) + std::exp(-z * std::cosh(t) - v * t));
  };
  // The integrand peaks near t* = asinh(v/z); integrate in pieces around it.
  const double tp = std::asinh(v / z);
  QuadratureOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = std::numeric_limits<double>::min();
  double s = quad(f, 0.0, tp, o);
  s += quad(f, tp, std::numeric_limits<double>::infinity(), o);
  return s;
}

}  // namespace

void MaternKernel::validate() const {
  require(d == 1 || d == 2, "Matern kernel dimension must be 1 or 2");
  require(std::isfinite(m) && m > 0.0, "Matern inverse length scale m must be > 0");
  std::ostringstream os;
  os << "Matern smoothness alpha = " << alpha << " must exceed d/2 = " << 0.5 * d;
  require(std::isfinite(alpha) && 2.0 * alpha > d, os.str());
}

double bessel_k(double v, double z) {
  require(z > 0.0 && v >= 0.0, "bessel_k requires z > 0 and v >= 0");
  const double twice = 2.0 * v;
  const double rt = std::round(twice);
  if (std::abs(twice - rt) < 1e-14 && static_cast<long>(rt) % 2 == 1 && v < 60.0) {
    return bessel_k_half_integer(static_cast<int>((rt - 1) / 2), z);
  }
  if (v <= 25.0) return std::cyl_bessel_k(v, z);
  return bessel_k_integral(v, z);
}

double matern_peak(const MaternKernel& k) {
  k.validate();
  const double nu = k.order();
  return std::exp(std::lgamma(nu) - std::lgamma(k.alpha) +
                  (k.d - 2.0 * k.alpha) * std::log(k.m)) /
         (std::pow(2.0, k.d) * std::pow(kPi, 0.5 * k.d));
}

double matern_eval(const MaternKernel& k, double r) {
  require(r >= 0.0, "matern_eval: r must be >= 0");
  const double nu = k.order();
  const double z = r * k.m;
  if (z < 1e-10) return matern_peak(k);
  if (z > 740.0) return 0.0;
  const double log_norm = (k.alpha - 1.0) * std::log(2.0) + std::lgamma(k.alpha) +
                          0.5 * k.d * std::log(2.0 * kPi);
  const double kv = bessel_k(nu, z);
  if (kv == 0.0) return 0.0;
  return std::exp(nu * std::log(r / k.m) + std::log(kv) - log_norm);
}

double matern_spectrum(const MaternKernel& k, double xi_norm) {
  return std::pow(xi_norm * xi_norm + k.m * k.m, -k.alpha);
}

double covariance(const MaternKernel& k, double sigma2, double r) {
  require(sigma2 >= 0.0, "covariance: sigma2 must be >= 0");
  return sigma2 * matern_eval(MaternKernel{2.0 * k.alpha, k.m, k.d}, r);
}

double holder_constant(const MaternKernel& k, double eta) {
  k.validate();
  std::ostringstream os;
  os << "Holder exponent eta = " << eta << " must satisfy 0 < eta <= 1 and eta < "
     << "2 alpha - d = " << 2.0 * k.alpha - k.d;
  require(eta > 0.0 && eta <= 1.0 && eta < 2.0 * k.alpha - k.d, os.str(),
          ErrorCode::kDomain);
  // Radial form: surface measure of the unit sphere is 2 (d=1) or 2 pi (d=2).
  const double surface = k.d == 1 ? 2.0 : 2.0 * kPi;
  const double p = eta + k.d - 1.0;
  const double margin = 2.0 * k.alpha - k.d - eta;
  if (margin < 1e-6) {
    std::ostringstream msg;
    msg << "Holder constant integral diverges: eta = " << eta
        << " is within " << margin << " of 2 alpha - d";
    fail(ErrorCode::kDivergence, msg.str());
  }
  // rho = m e^u turns both power-law ends into exponential decay.
  auto f = [&](double u) {
    const double lr = std::log(k.m) + u;
    const double lm = std::log(k.m);
    const double ls = 2.0 * std::max(lr, lm) + std::log1p(std::exp(-2.0 * std::abs(lr - lm)));
    return std::exp((p + 1.0) * lr - k.alpha * ls);
  };
  double integral = 0.0;
  try {
    QuadratureOptions o;
    o.abs_tol = 1e-14;
    const double inf = std::numeric_limits<double>::infinity();
    integral = quad(f, -inf, 0.0, o) + quad(f, 0.0, inf, o);
  } catch (const Error& e) {
    fail(ErrorCode::kDivergence,
         std::string("Holder constant integral diverges near eta = 2 alpha - d: ") +
             e.what());
  }
  return std::pow(2.0, 1.0 - eta) * std::pow(2.0 * kPi, -k.d) * surface * integral;
}

double decay_radius(const MaternKernel& k, double tol) {
  require(tol > 0.0, "decay_radius: tol must be positive");
  const double peak = matern_peak(k);
  if (tol >= peak) return 0.0;
  double lo = 0.0;
  double hi = 1.0 / k.m;
  while (matern_eval(k, hi) > tol) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (matern_eval(k, mid) > tol) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double radial_moment(const MaternKernel& k, int p) {
  require(p >= 0, "radial_moment: p must be >= 0");
  auto f = [&](double r) { return std::pow(r, p) * matern_eval(k, r); };
  const double c = 1.0 / k.m;
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  return quad(f, 0.0, c, o) + quad(f, c, std::numeric_limits<double>::infinity(), o);
}

double matern_total_integral(const MaternKernel& k) {
  return std::pow(k.m, -2.0 * k.alpha);
}

std::size_t KernelGrid::size(int d) const {
  const std::size_t side = 2 * static_cast<std::size_t>(n) + 1;
  return d == 1 ? side : side * side;
}

}  // namespace levyfield
