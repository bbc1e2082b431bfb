// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "levyfield/field.hpp"
#include "levyfield/matern.hpp"
#include "levyfield/measure.hpp"
#include "levyfield/noise.hpp"

namespace levyfield {

/// Partition of {0, ..., n-1} into disjoint nonempty blocks.
struct SetPartition {
  std::vector<std::vector<int>> blocks;
};

/// All set partitions of n elements, 1 <= n <= 8, in restricted-growth order.
std::vector<SetPartition> enumerate_partitions(int n);

/// c_1 = b + b_1, c_2 = sigma^2 + b_2, c_n = b_n (n >= 3).
struct CumulantTable {
  std::vector<double> c;  // c[0] unused
  int max_order = 0;

  double operator[](int n) const { return c.at(n); }
};

CumulantTable cumulants(const LevyTriplet& triplet, int max_order);

/// E[Z(f_1) ... Z(f_n)] by the partition sum, with each block integral
/// int prod f_j dx evaluated by the cell rule of `grid`.
double mixed_moment(const LevyTriplet& triplet, const CellGrid& grid,
                    const std::vector<std::vector<double>>& fs);

/// Cov(Z_k(x), Z_k(x + r)) = (sigma^2 + b_2) k_{2 alpha, m}(r).
double smoothed_covariance(const LevyTriplet& triplet, const MaternKernel& k, double r);

// ---------------------------------------------------------------------------
// Gaussian supremum tail.

/// P(sup_D |G| >= g) <= (K A g / (sqrt(v) sigma_bar^2))^v exp(-g^2 / (2 sigma_bar^2))
/// for g >= sigma_bar (1 + sqrt(v)).
double talagrand_bound(double sigma_bar, double A, double v, double K, double g);

/// Smallest g at which talagrand_bound applies.
inline double talagrand_threshold(double sigma_bar, double v) {
  return sigma_bar * (1.0 + std::sqrt(v));
}

struct TalagrandParameters {
  double sigma_bar = 0.0;  // sup_D sd of G
  double A = 0.0;
  double v = 0.0;
  double eta = 0.0;
  double holder = 0.0;     // C_1 with |k_{2a}(0) - k_{2a}(r)| <= C_1 r^eta
};

/// Covering parameters for the Gaussian part sigma W smoothed by k on D:
/// canonical distance d_c(x, y) <= C' |x - y|^{eta/2} with C'^2 = 2 sigma^2 C_1,
/// so N(D, d_c, eps) <= (A / eps)^v with A = max(C' a^{eta/2}, sigma_bar + 1),
/// v = 2 d / eta, a = diameter bound of D.
TalagrandParameters talagrand_parameters(double sigma2, const MaternKernel& k, double eta,
                                         const Box& D);

/// Smallest K such that talagrand_bound >= empirical at every valid g with a
/// positive empirical probability. Returns 0 when no point constrains K.
double calibrate_talagrand_k(const TalagrandParameters& p, const std::vector<double>& g,
                             const std::vector<double>& empirical);

// ---------------------------------------------------------------------------
// Poisson supremum tail.

/// kappa_1 = int sup_{x in D} |k(x - y)| dy and kappa_inf = k(0).
struct KernelEnvelope {
  double kappa1 = 0.0;
  double kappa_inf = 0.0;
};

KernelEnvelope kernel_envelope(const MaternKernel& k, const Box& D);

/// Displayed Chernov bound on P(sup_D |P_k| >= p):
/// exp((beta kappa_1 / kappa_inf) (e^beta int_{0<s<=1} s nu_+ +
///     (1 / (beta e (1 - tau))) int_{s>1} e^{beta s} nu_+)) exp(-(beta / kappa_inf) tau p).
double chernov_bound(const JumpMeasure& nu, double beta, double kappa1, double kappa_inf,
                     double tau, double p);

/// log of chernov_bound (finite where the bound itself overflows).
double chernov_log_bound(const JumpMeasure& nu, double beta, double kappa1,
                         double kappa_inf, double tau, double p);

/// Legendre form exp(-sup_theta (theta p - f(theta))) with
/// f(theta) = int_{R^d} int (e^{theta s k~(y)} - 1) nu_+(ds) dy, k~(y) = k(dist(y, D)).
double chernov_legendre_bound(const JumpMeasure& nu, const MaternKernel& k, const Box& D,
                              double p);

/// int (e^{beta s} - 1) nu_+(ds) in closed form for the supported kinds.
double log_mgf_integral(const JumpMeasure& nu, double beta);

struct ChernovGrid {
  std::vector<double> beta;  // each < nu.beta_limit()
  std::vector<double> tau;   // each in (0, 1)

  /// Default grid scaled to the convergence range of nu.
  static ChernovGrid for_measure(const JumpMeasure& nu);
};

/// Bound on P(sup_D |Z_k| >= j) for Z with triplet (b, sigma^2, nu):
/// |Z_k| <= |b_eff| max_D int k + |G_k| + |P_k|, split evenly between the
/// Gaussian and Poisson parts when both are present.
class SupTailBound {
 public:
  SupTailBound(const LevyTriplet& triplet, const MaternKernel& k, const Box& D,
               double talagrand_k = 1.0, double eta = 0.5, bool legendre = true,
               ChernovGrid grid = {});

  double operator()(double j) const { return std::exp(log_bound(j)); }
  double gaussian(double g) const { return std::exp(log_gaussian(g)); }
  double poisson(double p) const { return std::exp(log_poisson(p)); }
  /// Logarithms of the above, capped at 0.
  double log_bound(double j) const;
  double log_gaussian(double g) const;
  double log_poisson(double p) const;
  bool has_gaussian() const { return has_gauss_; }
  bool has_poisson() const { return has_poisson_; }
  /// Asymptotic exponential decay rate of the bound in j (inf when the
  /// Gaussian part alone is present).
  double exponential_rate() const;
  double drift_offset() const { return offset_; }
  const TalagrandParameters& talagrand() const { return tal_; }
  const KernelEnvelope& envelope() const { return env_; }

 private:
  LevyTriplet triplet_;
  MaternKernel k_;
  Box D_;
  double K_;
  bool legendre_;
  ChernovGrid grid_;
  TalagrandParameters tal_;
  KernelEnvelope env_;
  double offset_ = 0.0;
  bool has_gauss_ = false;
  bool has_poisson_ = false;
};

// ---------------------------------------------------------------------------
// Moment series.

struct SeriesOptions {
  double rel_tol = 1e-12;
  int decreasing_run = 5;
  long max_terms = 10'000'000;
};

struct SeriesBound {
  double value = 0.0;       // bound on E ||u||^n_{H^1}; +inf if it overflows
  double log_value = 0.0;
  double prefactor = 0.0;   // C~^n 2^{n-1} (B^n + B^{2n})
  double log_sum = 0.0;     // log of the series
  long terms = 0;
  std::string certificate;
};

/// C~^n 2^{n-1} (B^n + B^{2n}) sum_{j>=0} e^{2 n rho (j+1)^h} P(sup_D |Z_k| >= j),
/// C~ = c_apriori * data_norm. `tail_rate` is the exponential decay rate of
/// tail_prob (inf for super-exponential tails); with h = 1 it must exceed
/// 2 n rho, otherwise Error(kDivergence).
SeriesBound moment_series_bound(const TransformSpec& T, int n,
                                const std::function<double(double)>& tail_prob,
                                double tail_rate, double data_norm, double c_apriori,
                                const SeriesOptions& opts = {});

SeriesBound moment_series_bound(const TransformSpec& T, int n, const SupTailBound& tail,
                                double data_norm, double c_apriori,
                                const SeriesOptions& opts = {});

}  // namespace levyfield
