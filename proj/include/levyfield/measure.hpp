// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "levyfield/rng.hpp"

namespace levyfield {

struct DiscreteAtom {
  double location = 0.0;  // jump size s, nonzero
  double mass = 0.0;      // strictly positive
};

/// Lévy jump measure. Supported kinds:
///   null, finite discrete sum of point masses,
///   gamma    nu(ds) = v exp(-w s) / s ds on s > 0,
///   bigamma  nu(ds) = v exp(-w |s|) / |s| ds on s != 0.
/// All kinds satisfy  int |s| nu(ds) < inf.
class JumpMeasure {
 public:
  enum class Kind { kNull, kDiscrete, kGamma, kBigamma };

  static JumpMeasure null();
  static JumpMeasure discrete(std::vector<DiscreteAtom> atoms);
  static JumpMeasure gamma(double intensity, double decay);
  static JumpMeasure bigamma(double intensity, double decay);

  Kind kind() const { return kind_; }
  const std::vector<DiscreteAtom>& atoms() const { return atoms_; }
  double intensity() const { return v_; }
  double decay() const { return w_; }
  bool is_null() const { return kind_ == Kind::kNull; }
  bool is_continuous() const {
    return kind_ == Kind::kGamma || kind_ == Kind::kBigamma;
  }

  /// int_{lo < |s| <= hi} g(s) nu(ds). `hi` may be +inf. Exact for discrete
  /// measures; adaptive quadrature otherwise.
  double integrate(const std::function<double(double)>& g, double lo,
                   double hi) const;

  /// Same over the image measure nu_+ of nu under s -> |s|:
  /// int_{lo < s <= hi} g(s) nu_+(ds).
  double integrate_abs(const std::function<double(double)>& g, double lo,
                       double hi) const;

  /// Density of nu_+ at s > 0 for the continuous kinds.
  double abs_density(double s) const;

  /// nu(|s| > eps).
  double mass_above(double eps) const;

  /// Supremum of beta > 0 with int (e^{beta s} - 1) nu_+(ds) < inf.
  double beta_limit() const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::kNull;
  std::vector<DiscreteAtom> atoms_;
  double v_ = 0.0;
  double w_ = 0.0;
};

/// Characteristic triplet (b, sigma^2, nu).
struct LevyTriplet {
  double drift = 0.0;
  double sigma2 = 0.0;
  JumpMeasure nu = JumpMeasure::null();

  void validate() const;
};

/// Levy characteristic
///   psi(t) = i b t - sigma^2 t^2 / 2 + int (e^{its} - 1 - i t s 1_{|s|<=1}) nu(ds).
std::complex<double> levy_characteristic(const LevyTriplet& triplet, double t);

/// b_1 = int_{|s|>1} s nu(ds) for n = 1; b_n = int s^n nu(ds) for n >= 2.
double jump_moment(const JumpMeasure& nu, int n);

/// int (e^{beta s} - 1) nu_+(ds). Throws kDivergence outside the convergence
/// range of the measure.
double exp_integral(const JumpMeasure& nu, double beta);

/// Mean of the small jumps that the compensator removes:
/// int_{0<|s|<=1} s nu(ds).
double compensator_drift(const JumpMeasure& nu);

class JumpSampler;

struct Shell {
  int index = 0;
  double lower = 0.0;  // shell holds lower < |s| <= upper
  double upper = 0.0;  // +inf for shell 0
  double mass = 0.0;   // nu(shell)
};

struct ShellOptions {
  std::size_t shell_cap = 1'000'000;
  /// Add the mean of the discarded jumps int_{0<|s|<=eps} s nu(ds) to the
  /// drift. The shell count is then chosen from the standard deviation of
  /// the discarded part instead of its absolute first moment.
  bool absorb_small_jump_mean = false;
  int table_knots = 4096;
};

/// Finite-shell decomposition Theta_0 = {|s| > 1},
/// Theta_l = {1/(l+1) < |s| <= 1/l}, l = 1..ell_max.
struct ShellDecomposition {
  std::vector<Shell> shells;  // nonempty shells, ascending index
  int ell_max = 0;
  double threshold = 1.0;              // 1/(ell_max+1): smallest kept |s|
  double residual_drift_error = 0.0;   // int_{0<|s|<=threshold} |s| nu(ds)
  double residual_mean = 0.0;          // int_{0<|s|<=threshold} s nu(ds)
  double residual_variance = 0.0;      // int_{0<|s|<=threshold} s^2 nu(ds)
  double total_mass = 0.0;             // nu(|s| > threshold)
  bool absorbed = false;
  std::shared_ptr<const JumpSampler> sampler;

  /// Drift correction to apply when sampling: residual_mean if absorbed.
  double absorbed_drift() const { return absorbed ? residual_mean : 0.0; }
};

ShellDecomposition shell_partition(const JumpMeasure& nu,
                                   double drift_tolerance,
                                   const ShellOptions& opts = {});

/// Draws jump sizes from nu restricted to |s| > threshold, normalized.
/// Discrete measures use inverse-CDF over the atom masses; continuous
/// measures use a tabulated inverse CDF (monotone cubic on log-spaced knots)
/// polished by Newton steps on the exact cumulative mass.
class JumpSampler {
 public:
  JumpSampler(const JumpMeasure& nu, double threshold, int knots = 4096);
  ~JumpSampler();
  JumpSampler(const JumpSampler&) = delete;
  JumpSampler& operator=(const JumpSampler&) = delete;

  double total_mass() const { return total_; }
  double threshold() const { return threshold_; }

  /// One jump from the normalized restriction to |s| > threshold.
  double sample(Stream& rng) const;
  /// One jump from the normalized restriction to lo < |s| <= hi.
  double sample_between(double lo, double hi, Stream& rng) const;

  /// nu_+((threshold, s]) from the table (exact at knots, quadrature in between).
  double abs_cumulative(double s) const;
  /// Table-only inverse of abs_cumulative (no Newton polish).
  double table_inverse(double mass) const;

 private:
  double invert(double mass) const;
  double signed_jump(double magnitude, Stream& rng) const;

  JumpMeasure nu_;
  double threshold_;
  double total_ = 0.0;
  // discrete: sorted by |s|
  std::vector<DiscreteAtom> sorted_;
  std::vector<double> cumulative_;
  // continuous
  std::vector<double> log_knots_;
  std::vector<double> knot_mass_;
  double s_hi_ = 0.0;
  struct Table;
  std::unique_ptr<Table> table_;
};

/// Convenience: one draw from a finite measure (normalized), as used for the
/// compound Poisson construction.
double sample_jump(const JumpSampler& shell_sampler, Stream& rng);

}  // namespace levyfield
