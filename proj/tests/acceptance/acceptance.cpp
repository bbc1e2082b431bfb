// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "levyfield/analysis.hpp"
#include "levyfield/error.hpp"
#include "levyfield/experiments.hpp"
#include "levyfield/fem.hpp"
#include "levyfield/field.hpp"
#include "levyfield/matern.hpp"
#include "levyfield/mercer.hpp"
#include "levyfield/noise.hpp"
#include "levyfield/rng.hpp"
#include "levyfield/stats.hpp"

namespace levyfield {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

using Criterion = std::function<void(Outcome&)>;

struct Entry {
  const char* id;
  const char* title;
  double budget_s;
  Criterion run;
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

CellGrid padded_grid(const MaternKernel& k, const Box& D, int per_unit) {
  const Box box = D.padded(std::ceil(decay_radius(k, 1e-8)));
  std::array<int, 2> cells{static_cast<int>(std::lround(box.width(0) * per_unit)), 1};
  if (D.d == 2) cells[1] = static_cast<int>(std::lround(box.width(1) * per_unit));
  return {box, cells};
}

// The three noise kinds of the moment and characteristic-functional checks.
struct NamedTriplet {
  const char* name;
  LevyTriplet triplet;
};

std::vector<NamedTriplet> three_noises() {
  return {{"gaussian", {0.3, 1.0, JumpMeasure::null()}},
          {"poisson", {1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})}},
          {"bigamma", {0.0, 0.0, JumpMeasure::bigamma(1.0, 2.0)}}};
}

std::vector<double> test_function(const CellGrid& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = grid.center(i)[0];
    f[i] = 1.0 + 0.5 * std::sin(2.0 * kPi * x);
  }
  return f;
}

void ac1(Outcome& o) {
  const CellGrid grid{Box::interval(0.0, 1.0), {20, 1}};
  const auto f = test_function(grid);
  const std::vector<double> ts{0.25, 0.5, 1.0, 2.0, 4.0};
  const std::size_t n = 100000;
  const double limit = 4.0 / std::sqrt(static_cast<double>(n));
  for (const auto& nt : three_noises()) {
    const auto est = empirical_char_functional(nt.triplet, grid, f, ts, n, derive_seed(101, 0));
    double worst = 0.0;
    for (const auto& e : est) worst = std::max(worst, e.error());
    o.detail << " " << nt.name << " max|err|=" << g(worst);
    o.require(worst <= limit, std::string(nt.name) + " error above 4/sqrt(n)");
  }
  o.detail << " limit=" << g(limit);
}

void ac2(Outcome& o) {
  // sigma^2 + b_2 = 0.5 + 2 v / w^2 = 1.
  const LevyTriplet t{0.0, 0.5, JumpMeasure::bigamma(1.0, 2.0)};
  const MaternKernel k{1.0, 1.0, 1};
  const Box D = Box::interval(0.0, 2.0);
  const CellGrid grid = padded_grid(k, D, 32);
  const EvalGrid eval = EvalGrid::lattice(D, {64, 1});
  const FieldSmoother sm(k, grid, eval);
  const NoiseSampler sampler(t, grid);
  const std::size_t n = 10000;
  const std::vector<int> lags{0, 4, 8, 16, 32};
  std::vector<std::vector<double>> x(lags.size()), y(lags.size());
  for (std::size_t s = 0; s < n; ++s) {
    const auto fr = sm.smooth(sampler.sample(derive_seed(202, s)));
    for (std::size_t l = 0; l < lags.size(); ++l) {
      x[l].push_back(fr.values[16]);
      y[l].push_back(fr.values[16 + lags[l]]);
    }
  }
  for (std::size_t l = 0; l < lags.size(); ++l) {
    const double mx = summarize(x[l]).mean, my = summarize(y[l]).mean;
    std::vector<double> prod(n);
    for (std::size_t s = 0; s < n; ++s) prod[s] = (x[l][s] - mx) * (y[l][s] - my);
    const Summary sp = summarize(prod);
    const double r = lags[l] / 32.0;
    const double ref = smoothed_covariance(t, k, r);
    const double z = std::abs(sp.mean - ref) / sp.std_error();
    o.detail << " r=" << g(r) << ":" << g(z) << "se";
    o.require(z <= 3.0, "lag " + g(r) + " beyond 3 standard errors");
  }
}

void ac3(Outcome& o) {
  const CellGrid grid{Box::interval(0.0, 1.0), {20, 1}};
  const auto f = test_function(grid);
  const std::size_t n = 100000;
  for (const auto& nt : three_noises()) {
    const NoiseSampler sampler(nt.triplet, grid);
    std::vector<double> z(n);
    for (std::size_t s = 0; s < n; ++s) z[s] = apply_functional(sampler.sample(derive_seed(303, s)), f);
    double worst = 0.0;
    for (int order = 1; order <= 4; ++order) {
      std::vector<double> p(n);
      for (std::size_t s = 0; s < n; ++s) p[s] = std::pow(z[s], order);
      const Summary sp = summarize(p);
      const double ref = mixed_moment(nt.triplet, grid, std::vector<std::vector<double>>(order, f));
      const double dev = std::abs(sp.mean - ref) / sp.std_error();
      worst = std::max(worst, dev);
      o.require(dev <= 4.0, std::string(nt.name) + " order " + std::to_string(order));
    }
    o.detail << " " << nt.name << " max=" << g(worst) << "se";
  }
}

void ac4(Outcome& o) {
  struct Case {
    double alpha;
    int d;
    std::array<int, 2> coarse, fine;
  };
  // 1D doubles the nodes per axis, 2D doubles the total node count.
  const std::vector<Case> cases{{1.0, 1, {200, 0}, {400, 0}},
                                {2.0, 1, {200, 0}, {400, 0}},
                                {2.0, 2, {30, 30}, {43, 43}}};
  for (const auto& c : cases) {
    const Box box = c.d == 1 ? Box::interval(-2.0, 2.0) : Box::rectangle(-1.0, 1.0, -1.0, 1.0);
    const MaternKernel k{c.alpha, 1.0, c.d};
    const auto coarse = eig_decay_report(nystrom_eig(k, box, c.coarse), 5, 50, 0.1);
    const auto fine = eig_decay_report(nystrom_eig(k, box, c.fine), 5, 50, 0.1);
    const double target = -2.0 * c.alpha / c.d;
    const double growth = fine.product_bound / coarse.product_bound;
    o.detail << " (a=" << g(c.alpha) << ",d=" << c.d << ") slope=" << g(coarse.slope)
             << " prod ratio=" << g(growth);
    o.require(std::abs(coarse.slope - target) <= 0.3 && std::abs(fine.slope - target) <= 0.3,
              "slope off -2a/d by more than 0.3");
    o.require(std::isfinite(coarse.product_bound) && growth <= 1.25,
              "product sequence grows under refinement");
  }
}

void ac5(Outcome& o) {
  const auto basis = std::make_shared<const MercerBasis>(
      nystrom_eig({2.0, 1.0, 1}, Box::interval(-2.0, 2.0), {200, 0}));
  std::vector<int> orders;
  for (int n = 5; n <= 50; n += 5) orders.push_back(n);
  const auto kappa = remainder_bounds(*basis, orders, Box::interval(-0.5, 0.5));
  const auto fit = fit_rate(std::vector<double>(orders.begin(), orders.end()), kappa);
  const double limit = -(2.0 * 2.0 / 1.0 - 2.0) + 0.3;
  o.detail << " slope=" << g(fit.slope) << " r2=" << g(fit.r2) << " limit=" << g(limit);
  o.require(fit.slope <= limit, "remainder decays too slowly");
}

StudyConfig study(double alpha, std::size_t samples) {
  StudyConfig cfg;
  cfg.problem.triplet = {0.0, 1.0, JumpMeasure::gamma(1.0, 4.0)};
  cfg.problem.kernel = {alpha, 1.0, 1};
  cfg.problem.domain = Box::interval(0.0, 1.0);
  cfg.problem.mesh_intervals = {32, 1};
  cfg.samples = samples;
  cfg.seed = 1;
  cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return cfg;
}

void ac6(Outcome& o) {
  const auto r = cutoff_rate_study(study(1.0, 200));
  o.detail << " slope=" << g(r.field_fit.slope) << " r2=" << g(r.field_fit.r2)
           << " solution slope=" << g(r.solution_fit.slope);
  o.require(r.field_fit.slope <= -0.9, "slope above -0.9 m");
  o.require(r.field_fit.r2 >= 0.9, "R^2 below 0.9");
}

void ac7(Outcome& o) {
  const auto r = kl_rate_study(study(2.0, 200));
  const double limit = -(2.0 * 2.0 / 1.0 - 2.0) + 0.5;
  const double flux = *std::min_element(r.flux_correlation.begin(), r.flux_correlation.end());
  o.detail << " slope=" << g(r.fit.slope) << " r2=" << g(r.fit.r2) << " limit=" << g(limit)
           << " min flux corr=" << g(flux);
  o.require(r.fit.slope <= limit, "solution error decays too slowly");
  o.require(r.fit.r2 >= 0.9, "R^2 below 0.9");
  o.require(flux > 0.9, "flux perturbation does not track the solution error");
}

void ac8(Outcome& o) {
  const std::vector<double> thresholds{0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0};
  const std::vector<NamedTriplet> jumps{{"poisson", {1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})}},
                                        {"gamma", {0.0, 0.0, JumpMeasure::gamma(1.0, 4.0)}}};
  for (const auto& nt : jumps) {
    StudyConfig cfg = study(1.0, 10000);
    cfg.problem.triplet = nt.triplet;
    cfg.tail_thresholds = thresholds;
    const auto r = tail_study(cfg);
    double worst = kInf;
    for (const auto& row : r.rows) {
      const double p = row.empirical_poisson;
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.samples));
      worst = std::min(worst, row.chernov - p);
      o.require(row.chernov + 3.0 * se >= p, std::string(nt.name) + " at p=" + g(row.threshold));
    }
    o.detail << " " << nt.name << " min(bound-emp)=" << g(worst);
  }
  StudyConfig cfg = study(1.0, 10000);
  cfg.problem.triplet = {0.0, 1.0, JumpMeasure::null()};
  cfg.tail_thresholds = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  const auto r = tail_study(cfg);
  const double g0 = talagrand_threshold(r.talagrand.sigma_bar, r.talagrand.v);
  for (const auto& row : r.rows) {
    if (row.threshold >= g0) {
      o.require(row.talagrand >= row.empirical_gaussian, "Gaussian tail at g=" + g(row.threshold));
    }
  }
  o.detail << " gaussian K=" << g(r.calibrated_k) << " valid from g=" << g(g0);
}

struct Rates {
  double l2, h1;
};

Rates fem_rates(int d) {
  std::vector<double> h, el2, eh1;
  for (int n : {8, 16, 32, 64, 128}) {
    const auto mesh = std::make_shared<const Mesh>(
        d == 1 ? Mesh::interval(0.0, 1.0, n) : Mesh::rectangle(Box::rectangle(0.0, 1.0, 0.0, 1.0), n, n));
    FemData data = FemData::constant(*mesh, 0.0);
    data.f = mesh->sample([d](double x, double y) {
      return d == 1 ? kPi * kPi * std::sin(kPi * x)
                    : 2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
    });
    const auto s = assemble_solve(mesh, std::vector<double>(mesh->num_vertices(), 1.0), data);
    const auto e = error_norms(
        s,
        [d](double x, double y) { return std::sin(kPi * x) * (d == 1 ? 1.0 : std::sin(kPi * y)); },
        [d](double x, double y) {
          if (d == 1) return std::array<double, 2>{kPi * std::cos(kPi * x), 0.0};
          return std::array<double, 2>{kPi * std::cos(kPi * x) * std::sin(kPi * y),
                                       kPi * std::sin(kPi * x) * std::cos(kPi * y)};
        });
    h.push_back(mesh->mesh_size());
    el2.push_back(e.l2);
    eh1.push_back(e.h1_semi);
  }
  return {fit_rate(h, el2).slope, fit_rate(h, eh1).slope};
}

void ac9(Outcome& o) {
  for (int d : {1, 2}) {
    const Rates r = fem_rates(d);
    o.detail << " d=" << d << " L2=" << g(r.l2) << " H1=" << g(r.h1);
    o.require(std::abs(r.l2 - 2.0) <= 0.2, "L2 rate in d=" + std::to_string(d));
    o.require(std::abs(r.h1 - 1.0) <= 0.15, "H1 rate in d=" + std::to_string(d));
  }
  ProblemSpec p;
  p.triplet = {0.0, 1.0, JumpMeasure::null()};
  p.kernel = {1.0, 1.0, 1};
  p.mesh_intervals = {32, 1};
  const SolutionPipeline pipe(p);
  const double limit = dirichlet_apriori_constant(p.domain);
  double worst = 0.0;
  for (std::size_t s = 0; s < 1000; ++s) {
    const auto run = pipe.run(derive_seed(909, s));
    worst = std::max(worst, apriori_ratio(run.solution, run.coefficient.values, pipe.data()));
  }
  o.detail << " max a priori ratio=" << g(worst) << " (constant " << g(limit) << ")";
  o.require(worst <= limit, "a priori ratio above the constant");
}

void ac10(Outcome& o) {
  StudyConfig cfg = study(1.0, 2000);
  cfg.problem.triplet = {0.0, 0.0, JumpMeasure::gamma(1.0, 4.0)};
  cfg.moment_orders = {1, 2, 3, 4};
  const auto r = mc_solution_moments(cfg);
  o.require(r.failures.empty(), "sample failures");
  for (const auto& e : r.estimates) {
    if (e.order <= 3) {
      const double rel = e.std_error / e.mean;
      o.detail << " n=" << e.order << " mean=" << g(e.mean) << " bound=" << g(e.bound);
      o.require(rel <= 0.05, "unstable estimate at n=" + std::to_string(e.order));
      o.require(std::isfinite(e.bound) && e.ci.high <= e.bound,
                "estimate not dominated at n=" + std::to_string(e.order));
    } else {
      const bool refused = std::isinf(e.bound) &&
                           e.bound_note.find("n < beta / (2 kappa rho)") != std::string::npos;
      o.detail << " n=4 refused=" << (refused ? "yes" : "no");
      o.require(refused, "order 4 not refused with the summability diagnostic");
    }
  }
}

}  // namespace
}  // namespace levyfield

int main() {
  using namespace levyfield;
  const std::vector<Entry> entries{
      {"AC1", "characteristic functional", 120.0, ac1},
      {"AC2", "covariance reproduction", 120.0, ac2},
      {"AC3", "moment formula", 300.0, ac3},
      {"AC4", "eigenvalue decay", 180.0, ac4},
      {"AC5", "Mercer remainder rate", 120.0, ac5},
      {"AC6", "cut-off rate", 300.0, ac6},
      {"AC7", "truncation solution rate", 600.0, ac7},
      {"AC8", "tail domination", 300.0, ac8},
      {"AC9", "finite elements", 300.0, ac9},
      {"AC10", "moment existence", 300.0, ac10},
  };
  int failed = 0;
  for (const auto& e : entries) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(o);
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail << " [error: " << ex.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= e.budget_s, "runtime budget " + g(e.budget_s) + " s");
    failed += !o.pass;
    std::printf("%s %s %s (%.1f s):%s\n", e.id, o.pass ? "PASS" : "FAIL", e.title, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(entries.size()) - failed, entries.size());
  return failed == 0 ? 0 : 1;
}
