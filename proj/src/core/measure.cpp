// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levyfield/error.hpp"
#include "levyfield/quadrature.hpp"

namespace levyfield {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

JumpMeasure JumpMeasure::null() { return {}; }

JumpMeasure JumpMeasure::discrete(std::vector<DiscreteAtom> atoms) {
  for (const auto& a : atoms) {
    require(std::isfinite(a.location) && a.location != 0.0,
            "discrete jump locations must be finite and nonzero");
    require(std::isfinite(a.mass) && a.mass > 0.0,
            "discrete jump masses must be strictly positive");
  }
  JumpMeasure m;
  if (atoms.empty()) return m;
  m.kind_ = Kind::kDiscrete;
  m.atoms_ = std::move(atoms);
  return m;
}

JumpMeasure JumpMeasure::gamma(double intensity, double decay) {
  require(intensity > 0.0 && std::isfinite(intensity),
          "gamma intensity v must be positive");
  require(decay > 0.0 && std::isfinite(decay), "gamma decay w must be positive");
  JumpMeasure m;
  m.kind_ = Kind::kGamma;
  m.v_ = intensity;
  m.w_ = decay;
  return m;
}

JumpMeasure JumpMeasure::bigamma(double intensity, double decay) {
  JumpMeasure m = gamma(intensity, decay);
  m.kind_ = Kind::kBigamma;
  return m;
}

double JumpMeasure::abs_density(double s) const {
  if (!is_continuous() || !(s > 0.0)) return 0.0;
  const double c = kind_ == Kind::kBigamma ? 2.0 : 1.0;
  return c * v_ * std::exp(-w_ * s) / s;
}

double JumpMeasure::integrate(const std::function<double(double)>& g,
                              double lo, double hi) const {
  if (!(hi > lo)) return 0.0;
  switch (kind_) {
    case Kind::kNull:
      return 0.0;
    case Kind::kDiscrete: {
      double acc = 0.0;
      for (const auto& a : atoms_) {
        const double r = std::abs(a.location);
        if (r > lo && r <= hi) acc += a.mass * g(a.location);
      }
      return acc;
    }
    case Kind::kGamma:
    case Kind::kBigamma: {
      const bool both = kind_ == Kind::kBigamma;
      auto f = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double dens = v_ * std::exp(-w_ * s) / s;
        if (dens == 0.0) return 0.0;
        double val = g(s);
        if (both) val += g(-s);
        return val * dens;
      };
      // Split at |s| = 1 where compensated integrands have a kink.
      double acc = 0.0;
      if (lo < 1.0 && hi > 1.0) {
        acc += quad(f, lo, 1.0);
        acc += quad(f, 1.0, hi);
      } else {
        acc += quad(f, lo, hi);
      }
      return acc;
    }
  }
  return 0.0;
}

double JumpMeasure::integrate_abs(const std::function<double(double)>& g,
                                  double lo, double hi) const {
  // nu_+ = image of nu under |.|: for bigamma both half-lines fold onto s > 0.
  return integrate([&](double s) { return g(std::abs(s)); }, lo, hi);
}

double JumpMeasure::mass_above(double eps) const {
  return integrate([](double) { return 1.0; }, eps, kInf);
}

double JumpMeasure::beta_limit() const {
  return is_continuous() ? w_ : kInf;
}

std::string JumpMeasure::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kNull:
      os << "null";
      break;
    case Kind::kDiscrete:
      os << "discrete{";
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        os << (i ? ", " : "") << "(" << atoms_[i].location << ", "
           << atoms_[i].mass << ")";
      }
      os << "}";
      break;
    case Kind::kGamma:
      os << "gamma(v=" << v_ << ", w=" << w_ << ")";
      break;
    case Kind::kBigamma:
      os << "bigamma(v=" << v_ << ", w=" << w_ << ")";
      break;
  }
  return os.str();
}

void LevyTriplet::validate() const {
  require(std::isfinite(drift), "triplet drift must be finite");
  require(std::isfinite(sigma2) && sigma2 >= 0.0,
          "triplet Gaussian variance sigma2 must be >= 0");
}

std::complex<double> levy_characteristic(const LevyTriplet& triplet, double t) {
  require(std::isfinite(t), "levy_characteristic: t must be finite");
  triplet.validate();
  if (t == 0.0) return {0.0, 0.0};
  const auto& nu = triplet.nu;
  // cos(ts) - 1 = -2 sin^2(ts/2) avoids cancellation for small jumps.
  const double re_jump = nu.integrate(
      [t](double s) {
        const double h = std::sin(0.5 * t * s);
        return -2.0 * h * h;
      },
      0.0, kInf);
  const double im_jump = nu.integrate(
      [t](double s) {
        return std::sin(t * s) - (std::abs(s) <= 1.0 ? t * s : 0.0);
      },
      0.0, kInf);
  return {-0.5 * triplet.sigma2 * t * t + re_jump, triplet.drift * t + im_jump};
}

double jump_moment(const JumpMeasure& nu, int n) {
  require(n >= 1, "jump_moment: order must be >= 1");
  double v = 0.0;
  try {
    if (n == 1) {
      v = nu.integrate([](double s) { return s; }, 1.0, kInf);
    } else {
      v = nu.integrate([n](double s) { return std::pow(s, n); }, 0.0, kInf);
    }
  } catch (const Error& e) {
    fail(ErrorCode::kDivergence, "jump moment b_" + std::to_string(n) +
                                     " is not finite for " + nu.describe() +
                                     ": " + e.what());
  }
  if (!std::isfinite(v)) {
    fail(ErrorCode::kDivergence, "jump moment b_" + std::to_string(n) +
                                     " is not finite for " + nu.describe());
  }
  return v;
}

double exp_integral(const JumpMeasure& nu, double beta) {
  require(beta > 0.0, "exp_integral: beta must be positive");
  if (!(beta < nu.beta_limit())) {
    std::ostringstream os;
    os << "int (e^{beta s} - 1) nu_+(ds) diverges for beta = " << beta
       << " (requires beta < " << nu.beta_limit() << " for " << nu.describe()
       << ")";
    fail(ErrorCode::kDivergence, os.str());
  }
  return nu.integrate_abs([beta](double s) { return std::expm1(beta * s); },
                          0.0, kInf);
}

double compensator_drift(const JumpMeasure& nu) {
  return nu.integrate([](double s) { return s; }, 0.0, 1.0);
}

ShellDecomposition shell_partition(const JumpMeasure& nu,
                                   double drift_tolerance,
                                   const ShellOptions& opts) {
  require(drift_tolerance > 0.0, "shell_partition: tolerance must be positive");
  require(opts.shell_cap >= 1, "shell_partition: shell cap must be >= 1");
  ShellDecomposition out;
  out.absorbed = opts.absorb_small_jump_mean;

  auto abs_first = [&](double eps) {
    return nu.integrate([](double s) { return std::abs(s); }, 0.0, eps);
  };
  auto second = [&](double eps) {
    return nu.integrate([](double s) { return s * s; }, 0.0, eps);
  };
  // Criterion monotone nonincreasing in ell.
  auto criterion = [&](std::size_t ell) {
    const double eps = 1.0 / static_cast<double>(ell + 1);
    return opts.absorb_small_jump_mean ? std::sqrt(second(eps)) : abs_first(eps);
  };

  std::size_t ell = 0;
  if (criterion(0) > drift_tolerance) {
    const double at_cap = criterion(opts.shell_cap);
    if (at_cap > drift_tolerance) {
      std::ostringstream os;
      os << "shell decomposition of " << nu.describe()
         << " cannot reach tolerance " << drift_tolerance << " within "
         << opts.shell_cap << " shells (achieved residual " << at_cap << ")";
      fail(ErrorCode::kConvergence, os.str());
    }
    std::size_t lo = 0, hi = opts.shell_cap;  // criterion(lo) > tol >= criterion(hi)
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (criterion(mid) > drift_tolerance) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    ell = hi;
  }
  out.ell_max = static_cast<int>(ell);
  out.threshold = 1.0 / static_cast<double>(ell + 1);
  out.residual_drift_error = abs_first(out.threshold);
  out.residual_mean =
      nu.integrate([](double s) { return s; }, 0.0, out.threshold);
  out.residual_variance = second(out.threshold);

  auto one = [](double) { return 1.0; };
  if (nu.kind() == JumpMeasure::Kind::kDiscrete) {
    std::vector<double> mass(ell + 1, 0.0);
    for (const auto& a : nu.atoms()) {
      const double r = std::abs(a.location);
      if (r <= out.threshold) continue;
      const std::size_t l =
          r > 1.0 ? 0
                  : std::min<std::size_t>(ell, static_cast<std::size_t>(
                                                   std::floor(1.0 / r)));
      // 1/(l+1) < r <= 1/l  <=>  l = floor(1/r); guard the boundary r = 1/l.
      std::size_t lc = l;
      if (lc > 0 && r > 1.0 / static_cast<double>(lc)) --lc;
      mass[lc] += a.mass;
    }
    for (std::size_t l = 0; l <= ell; ++l) {
      if (mass[l] <= 0.0) continue;
      out.shells.push_back({static_cast<int>(l), l == 0 ? 1.0 : 1.0 / (l + 1.0),
                            l == 0 ? kInf : 1.0 / static_cast<double>(l),
                            mass[l]});
    }
  } else if (nu.is_continuous()) {
    out.shells.reserve(ell + 1);
    out.shells.push_back({0, 1.0, kInf, nu.integrate(one, 1.0, kInf)});
    for (std::size_t l = 1; l <= ell; ++l) {
      const double lo = 1.0 / (l + 1.0);
      const double hi = 1.0 / static_cast<double>(l);
      out.shells.push_back({static_cast<int>(l), lo, hi, nu.integrate(one, lo, hi)});
    }
  }
  for (const auto& s : out.shells) out.total_mass += s.mass;
  if (!nu.is_null()) {
    out.sampler = std::make_shared<JumpSampler>(nu, out.threshold, opts.table_knots);
  }
  return out;
}

}  // namespace levyfield
