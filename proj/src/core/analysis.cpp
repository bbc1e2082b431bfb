// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/analysis.hpp"

#include <algorithm>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "levyfield/error.hpp"
#include "levyfield/quadrature.hpp"

namespace levyfield {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

// Boundary length of D (number of endpoints in 1D).
double perimeter(const Box& D) {
  return D.d == 1 ? 2.0 : 2.0 * (D.width(0) + D.width(1));
}

double diameter(const Box& D) {
  return D.d == 1 ? D.width(0) : std::hypot(D.width(0), D.width(1));
}

}  // namespace

std::vector<SetPartition> enumerate_partitions(int n) {
  std::ostringstream os;
  os << "enumerate_partitions: n = " << n << " outside [1, 8]";
  require(n >= 1 && n <= 8, os.str(), ErrorCode::kDomain);
  std::vector<SetPartition> out;
  // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(n, 0), mx(n, 0);
  while (true) {
    const int blocks = *std::max_element(a.begin(), a.end()) + 1;
    SetPartition p;
    p.blocks.assign(blocks, {});
    for (int i = 0; i < n; ++i) p.blocks[a[i]].push_back(i);
    out.push_back(std::move(p));
    int i = n - 1;
    while (i > 0 && a[i] == mx[i - 1] + 1) --i;
    if (i == 0) break;
    ++a[i];
    mx[i] = std::max(mx[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      mx[j] = mx[j - 1];
    }
  }
  return out;
}

CumulantTable cumulants(const LevyTriplet& triplet, int max_order) {
  triplet.validate();
  require(max_order >= 1, "cumulants: max order must be >= 1");
  CumulantTable t;
  t.max_order = max_order;
  t.c.assign(max_order + 1, 0.0);
  for (int n = 1; n <= max_order; ++n) t.c[n] = jump_moment(triplet.nu, n);
  t.c[1] += triplet.drift;
  if (max_order >= 2) t.c[2] += triplet.sigma2;
  return t;
}

double mixed_moment(const LevyTriplet& triplet, const CellGrid& grid,
                    const std::vector<std::vector<double>>& fs) {
  const int n = static_cast<int>(fs.size());
  require(n >= 1, "mixed_moment: at least one function required");
  for (const auto& f : fs) {
    require(f.size() == grid.size(), "mixed_moment: functions must share the grid");
  }
  const CumulantTable c = cumulants(triplet, n);
  const double vol = grid.cell_volume();
  double total = 0.0;
  for (const SetPartition& p : enumerate_partitions(n)) {
    double term = 1.0;
    for (const auto& block : p.blocks) {
      double integral = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double prod = 1.0;
        for (int i : block) prod *= fs[i][j];
        integral += prod;
      }
      term *= c[static_cast<int>(block.size())] * integral * vol;
      if (term == 0.0) break;
    }
    total += term;
  }
  return total;
}

double smoothed_covariance(const LevyTriplet& triplet, const MaternKernel& k, double r) {
  triplet.validate();
  const double b2 = jump_moment(triplet.nu, 2);
  return covariance(k, triplet.sigma2 + b2, std::abs(r));
}

double talagrand_bound(double sigma_bar, double A, double v, double K, double g) {
  require(sigma_bar > 0.0 && v > 0.0 && K > 0.0,
          "talagrand_bound: sigma_bar, v and K must be positive");
  require(A >= sigma_bar, "talagrand_bound: covering constant A must be >= sigma_bar");
  const double g0 = talagrand_threshold(sigma_bar, v);
  if (g < g0 * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "talagrand_bound: g = " << g << " is below the validity threshold "
       << "sigma_bar (1 + sqrt(v)) = " << g0;
    fail(ErrorCode::kDomain, os.str());
  }
  const double s2 = sigma_bar * sigma_bar;
  const double lg = v * std::log(K * A * g / (std::sqrt(v) * s2)) - g * g / (2.0 * s2);
  return std::exp(lg);
}

TalagrandParameters talagrand_parameters(double sigma2, const MaternKernel& k, double eta,
                                         const Box& D) {
  require(sigma2 > 0.0, "talagrand_parameters: Gaussian variance must be positive");
  D.validate();
  require(D.d == k.d, "talagrand_parameters: dimension mismatch");
  const MaternKernel k2{2.0 * k.alpha, k.m, k.d};
  TalagrandParameters p;
  p.eta = eta;
  p.sigma_bar = std::sqrt(covariance(k, sigma2, 0.0));
  p.holder = holder_constant(k2, eta);
  p.v = 2.0 * k.d / eta;
  const double c_prime = std::sqrt(2.0 * sigma2 * p.holder);
  p.A = std::max(c_prime * std::pow(diameter(D), 0.5 * eta), p.sigma_bar + 1.0);
  return p;
}

double calibrate_talagrand_k(const TalagrandParameters& p, const std::vector<double>& g,
                             const std::vector<double>& empirical) {
  require(g.size() == empirical.size(), "calibrate_talagrand_k: size mismatch");
  const double g0 = talagrand_threshold(p.sigma_bar, p.v);
  double log_k = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < g0 || !(empirical[i] > 0.0)) continue;
    const double log_b1 = std::log(talagrand_bound(p.sigma_bar, p.A, p.v, 1.0, g[i]));
    log_k = std::max(log_k, (std::log(empirical[i]) - log_b1) / p.v);
  }
  return log_k == -kInf ? 0.0 : std::exp(log_k);
}

KernelEnvelope kernel_envelope(const MaternKernel& k, const Box& D) {
  k.validate();
  D.validate();
  require(D.d == k.d, "kernel_envelope: dimension mismatch");
  KernelEnvelope e;
  e.kappa_inf = matern_peak(k);
  // k~(y) = k(dist(y, D)): interior, boundary strips and (2D) corner discs.
  e.kappa1 = D.volume() * e.kappa_inf + perimeter(D) * radial_moment(k, 0);
  if (k.d == 2) e.kappa1 += matern_total_integral(k);
  return e;
}

double chernov_log_bound(const JumpMeasure& nu, double beta, double kappa1,
                         double kappa_inf, double tau, double p) {
  require(tau > 0.0 && tau < 1.0, "chernov_bound: tau must lie in (0, 1)", ErrorCode::kDomain);
  require(beta > 0.0, "chernov_bound: beta must be positive", ErrorCode::kDomain);
  require(kappa1 > 0.0 && kappa_inf > 0.0, "chernov_bound: kappa_1 and kappa_inf must be positive");
  require(p >= 0.0, "chernov_bound: threshold must be nonnegative");
  if (!(beta < nu.beta_limit())) {
    std::ostringstream os;
    os << "chernov_bound: int_{s>1} e^{beta s} nu_+(ds) diverges for beta = " << beta
       << " (requires beta < " << nu.beta_limit() << ")";
    fail(ErrorCode::kDivergence, os.str());
  }
  double small = 0.0;
  double large = 0.0;
  if (nu.is_continuous()) {
    // int_0^1 s c v e^{-w s} / s ds and int_1^inf e^{beta s} c v e^{-w s} / s ds = c v E_1(w - beta).
    const double cv = (nu.kind() == JumpMeasure::Kind::kBigamma ? 2.0 : 1.0) * nu.intensity();
    const double w = nu.decay();
    small = -cv * std::expm1(-w) / w;
    large = cv * boost::math::expint(1, w - beta);
  } else {
    small = nu.integrate_abs([](double s) { return s; }, 0.0, 1.0);
    large = nu.integrate_abs([beta](double s) { return std::exp(beta * s); }, 1.0, kInf);
  }
  if (!std::isfinite(small) || !std::isfinite(large)) {
    fail(ErrorCode::kDivergence, "chernov_bound: jump integrals are not finite");
  }
  const double inner =
      std::exp(beta) * small + large / (beta * std::exp(1.0) * (1.0 - tau));
  return beta * kappa1 / kappa_inf * inner - beta / kappa_inf * tau * p;
}

double chernov_bound(const JumpMeasure& nu, double beta, double kappa1, double kappa_inf,
                     double tau, double p) {
  return std::exp(chernov_log_bound(nu, beta, kappa1, kappa_inf, tau, p));
}

double log_mgf_integral(const JumpMeasure& nu, double beta) {
  require(beta >= 0.0, "log_mgf_integral: beta must be nonnegative");
  if (beta == 0.0) return 0.0;
  switch (nu.kind()) {
    case JumpMeasure::Kind::kNull:
      return 0.0;
    case JumpMeasure::Kind::kDiscrete: {
      double acc = 0.0;
      for (const auto& a : nu.atoms()) acc += a.mass * std::expm1(beta * std::abs(a.location));
      return acc;
    }
    case JumpMeasure::Kind::kGamma:
    case JumpMeasure::Kind::kBigamma: {
      const double w = nu.decay();
      if (!(beta < w)) {
        std::ostringstream os;
        os << "int (e^{beta s} - 1) nu_+(ds) diverges for beta = " << beta
           << " (requires beta < " << w << ")";
        fail(ErrorCode::kDivergence, os.str());
      }
      // Frullani: int (e^{beta s} - 1) e^{-w s} / s ds = log(w / (w - beta)).
      const double c = nu.kind() == JumpMeasure::Kind::kBigamma ? 2.0 : 1.0;
      return -c * nu.intensity() * std::log1p(-beta / w);
    }
  }
  return 0.0;
}

double chernov_legendre_bound(const JumpMeasure& nu, const MaternKernel& k, const Box& D,
                              double p) {
  k.validate();
  D.validate();
  require(D.d == k.d, "chernov_legendre_bound: dimension mismatch");
  if (nu.is_null()) return p > 0.0 ? 0.0 : 1.0;
  if (!(p > 0.0)) return 1.0;
  const double k0 = matern_peak(k);
  const double vol = D.volume();
  const double per = perimeter(D);
  QuadratureOptions q;
  q.abs_tol = 1e-12;
  q.rel_tol = 1e-9;
  // int_0^inf r^p G(theta k(r)) dr; r = e^{-u} on (0, 1] tames the
  // logarithmic singularity at r = 0 when theta k(0) approaches the limit.
  auto radial = [&](double theta, int pw) {
    auto g = [&](double r) {
      return std::pow(r, pw) * log_mgf_integral(nu, theta * matern_eval(k, r));
    };
    const double inner = quad([&](double u) { return std::exp(-u) * g(std::exp(-u)); }, 0.0,
                              kInf, q);
    return inner + quad(g, 1.0, kInf, q);
  };
  auto f = [&](double theta) {
    double val = vol * log_mgf_integral(nu, theta * k0) + per * radial(theta, 0);
    if (k.d == 2) val += 2.0 * kPi * radial(theta, 1);
    return val;
  };
  auto neg_h = [&](double theta) {
    const double v = f(theta);
    return std::isfinite(v) ? -(theta * p - v) : kInf;
  };
  double hi = nu.beta_limit() / k0;
  if (std::isfinite(hi)) {
    hi *= 1.0 - 1e-6;
  } else {
    // h is concave with h(0) = 0: double until it decreases.
    hi = 1.0 / k0;
    double prev = -neg_h(hi);
    for (int it = 0; it < 200; ++it) {
      const double cur = -neg_h(2.0 * hi);
      hi *= 2.0;
      if (!(cur > prev)) break;
      prev = cur;
    }
  }
  const auto r = boost::math::tools::brent_find_minima(neg_h, 0.0, hi, 50);
  const double best = std::max(0.0, -r.second);
  return std::exp(-best);
}

ChernovGrid ChernovGrid::for_measure(const JumpMeasure& nu) {
  ChernovGrid g;
  const double lim = nu.beta_limit();
  if (std::isfinite(lim)) {
    for (double f : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
      g.beta.push_back(f * lim);
    }
  } else {
    g.beta = {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  }
  g.tau = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
  return g;
}

SupTailBound::SupTailBound(const LevyTriplet& triplet, const MaternKernel& k, const Box& D,
                           double talagrand_k, double eta, bool legendre, ChernovGrid grid)
    : triplet_(triplet), k_(k), D_(D), K_(talagrand_k), legendre_(legendre),
      grid_(std::move(grid)) {
  triplet.validate();
  k.validate();
  D.validate();
  has_gauss_ = triplet.sigma2 > 0.0;
  has_poisson_ = !triplet.nu.is_null();
  if (has_gauss_) {
    require(talagrand_k > 0.0, "SupTailBound: Talagrand constant must be positive");
    tal_ = talagrand_parameters(triplet.sigma2, k, eta, D);
  }
  env_ = kernel_envelope(k, D);
  if (has_poisson_) {
    if (grid_.beta.empty() || grid_.tau.empty()) grid_ = ChernovGrid::for_measure(triplet.nu);
    for (double b : grid_.beta) {
      require(b > 0.0 && b < triplet.nu.beta_limit(),
              "SupTailBound: Chernov beta outside the convergence range", ErrorCode::kDomain);
    }
    for (double t : grid_.tau) {
      require(t > 0.0 && t < 1.0, "SupTailBound: Chernov tau outside (0, 1)",
              ErrorCode::kDomain);
    }
  }
  offset_ = std::abs(effective_drift(triplet)) * matern_total_integral(k);
}

double SupTailBound::log_gaussian(double g) const {
  if (!has_gauss_) return g > 0.0 ? -kInf : 0.0;
  if (g < talagrand_threshold(tal_.sigma_bar, tal_.v)) return 0.0;
  const double s2 = tal_.sigma_bar * tal_.sigma_bar;
  const double lg =
      tal_.v * std::log(K_ * tal_.A * g / (std::sqrt(tal_.v) * s2)) - g * g / (2.0 * s2);
  return std::min(0.0, lg);
}

double SupTailBound::log_poisson(double p) const {
  if (!has_poisson_) return p > 0.0 ? -kInf : 0.0;
  if (!(p > 0.0)) return 0.0;
  double best = 0.0;
  for (double b : grid_.beta) {
    for (double t : grid_.tau) {
      best = std::min(best, chernov_log_bound(triplet_.nu, b, env_.kappa1, env_.kappa_inf, t, p));
    }
  }
  if (legendre_) {
    const double lb = chernov_legendre_bound(triplet_.nu, k_, D_, p);
    if (lb > 0.0) best = std::min(best, std::log(lb));
  }
  return best;
}

double SupTailBound::log_bound(double j) const {
  const double x = j - offset_;
  if (!(x > 0.0)) return 0.0;
  if (has_gauss_ && has_poisson_) {
    return std::min(0.0, log_add(log_gaussian(0.5 * x), log_poisson(0.5 * x)));
  }
  if (has_gauss_) return log_gaussian(x);
  if (has_poisson_) return log_poisson(x);
  return -kInf;
}

double SupTailBound::exponential_rate() const {
  if (!has_poisson_) return kInf;
  double rate = 0.0;
  for (double b : grid_.beta) {
    for (double t : grid_.tau) rate = std::max(rate, b * t / env_.kappa_inf);
  }
  if (legendre_) rate = std::max(rate, triplet_.nu.beta_limit() / env_.kappa_inf);
  return has_gauss_ ? 0.5 * rate : rate;
}

namespace {

SeriesBound series_core(const TransformSpec& T, int n,
                        const std::function<double(double)>& log_tail, double tail_rate,
                        double data_norm, double c_apriori, const SeriesOptions& opts) {
  require(n >= 1, "moment_series_bound: moment order must be >= 1");
  require(data_norm >= 0.0 && c_apriori > 0.0,
          "moment_series_bound: data norm must be >= 0 and the a priori constant > 0");
  require(opts.rel_tol > 0.0 && opts.decreasing_run >= 1 && opts.max_terms > 0,
          "moment_series_bound: invalid options");
  const double rho = T.rho();
  const double h = T.h();
  const double growth = 2.0 * n * rho;
  if (h > 1.0 && std::isfinite(tail_rate)) {
    std::ostringstream os;
    os << "moment series diverges: envelope exponent h = " << h
       << " > 1 against exponentially decaying tails (all moments exist only for h < 1, "
       << "or h = 1 with n < beta / (2 kappa rho))";
    fail(ErrorCode::kDivergence, os.str());
  }
  if (h >= 2.0) {
    fail(ErrorCode::kDivergence,
         "moment series diverges: envelope exponent h >= 2 against Gaussian tails");
  }
  if (h == 1.0 && !(growth < tail_rate)) {
    std::ostringstream os;
    os << "moment series diverges: h = 1 requires n < beta / (2 kappa rho) = "
       << tail_rate / (2.0 * rho) << ", got n = " << n << " (rho = " << rho << ")";
    fail(ErrorCode::kDivergence, os.str());
  }

  SeriesBound out;
  const double log_b = std::log(T.B());
  const double log_c = data_norm > 0.0 ? std::log(c_apriori * data_norm) : -kInf;
  const double log_pref =
      n * log_c + (n - 1) * std::log(2.0) + log_add(n * log_b, 2.0 * n * log_b);
  out.prefactor = std::exp(log_pref);

  double log_sum = -kInf;
  double prev = kInf;
  int run = 0;
  long j = 0;
  double last_ratio = 0.0;
  for (;; ++j) {
    if (j >= opts.max_terms) {
      std::ostringstream os;
      os << "moment series did not meet the stopping rule within " << opts.max_terms
         << " terms";
      fail(ErrorCode::kConvergence, os.str());
    }
    const double jj = static_cast<double>(j);
    const double env = h == 0.0 ? growth : growth * std::pow(jj + 1.0, h);
    const double lp = std::min(0.0, log_tail(jj));
    const double term = lp == -kInf ? -kInf : env + lp;
    log_sum = log_add(log_sum, term);
    if (term <= prev) {
      ++run;
    } else {
      run = 0;
    }
    last_ratio = (prev == kInf || prev == -kInf) ? 0.0 : std::exp(term - prev);
    prev = term;
    const bool small = term == -kInf || term < std::log(opts.rel_tol) + log_sum;
    if (small && run >= opts.decreasing_run) break;
  }
  out.terms = j + 1;
  out.log_sum = log_sum;
  out.log_value = log_pref + log_sum;
  out.value = std::exp(out.log_value);

  std::ostringstream cert;
  cert << "stopped after " << out.terms << " terms; last term ratio " << last_ratio;
  if (h == 1.0 && std::isfinite(tail_rate)) {
    const double q = std::exp(growth - tail_rate);
    cert << "; asymptotic ratio e^{2 n rho - rate} = " << q
         << "; geometric remainder <= last term * " << q / (1.0 - q);
  } else if (h < 1.0) {
    cert << "; envelope sub-exponential (h = " << h << "), tail decays exponentially";
  } else {
    cert << "; tails super-exponential";
  }
  out.certificate = cert.str();
  return out;
}

}  // namespace

SeriesBound moment_series_bound(const TransformSpec& T, int n,
                                const std::function<double(double)>& tail_prob,
                                double tail_rate, double data_norm, double c_apriori,
                                const SeriesOptions& opts) {
  auto log_tail = [&](double j) {
    const double p = tail_prob(j);
    require(p >= 0.0, "moment_series_bound: tail probability must be nonnegative");
    return p > 0.0 ? std::log(p) : -kInf;
  };
  return series_core(T, n, log_tail, tail_rate, data_norm, c_apriori, opts);
}

SeriesBound moment_series_bound(const TransformSpec& T, int n, const SupTailBound& tail,
                                double data_norm, double c_apriori,
                                const SeriesOptions& opts) {
  return series_core(T, n, [&](double j) { return tail.log_bound(j); },
                     tail.exponential_rate(), data_norm, c_apriori, opts);
}

}  // namespace levyfield
