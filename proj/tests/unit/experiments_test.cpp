// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "levyfield/error.hpp"

namespace levyfield {
namespace {

StudyConfig small_config(const LevyTriplet& t, std::size_t samples = 24) {
  StudyConfig cfg;
  cfg.problem.triplet = t;
  cfg.problem.kernel = {1.0, 1.0, 1};
  cfg.problem.domain = Box::interval(0.0, 1.0);
  cfg.problem.mesh_intervals = {16, 1};
  cfg.samples = samples;
  cfg.seed = 11;
  cfg.workers = 1;
  return cfg;
}

TEST(Problem, NoiseGridCoversPaddedDomain) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::null()});
  const CellGrid g = cfg.problem.noise_grid(1.0);
  EXPECT_LE(g.box.lower[0], -1.0 + 1e-12);
  EXPECT_GE(g.box.upper[0], 2.0 - 1e-12);
  EXPECT_NEAR(g.box.width(0) / g.cells[0], cfg.problem.noise_spacing(0), 1e-12);
  EXPECT_GT(cfg.problem.resolved_padding(), 0.0);
}

TEST(Problem, InvalidConfigRejected) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::null()});
  cfg.samples = 1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = small_config({0.0, 1.0, JumpMeasure::null()});
  cfg.problem.kernel = {0.4, 1.0, 1};
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Pipeline, SampleIsReproducible) {
  const auto cfg = small_config({0.0, 1.0, JumpMeasure::gamma(1.0, 4.0)});
  const SolutionPipeline pipe(cfg.problem);
  const auto a = pipe.run(5);
  const auto b = pipe.run(5);
  EXPECT_EQ(a.solution.values, b.solution.values);
  for (double v : a.coefficient.values) EXPECT_GT(v, 0.0);
  EXPECT_GT(a.solution.h1, 0.0);
}

TEST(Moments, DeterministicNoiseHasZeroSpread) {
  const auto cfg = small_config({0.5, 0.0, JumpMeasure::null()}, 8);
  const auto r = mc_solution_moments(cfg);
  ASSERT_EQ(r.norms.size(), 8u);
  for (double v : r.norms) EXPECT_EQ(v, r.norms.front());
  for (const auto& e : r.estimates) {
    EXPECT_LE(e.std_error, 1e-12 * e.mean);
    EXPECT_NEAR(e.ci.high - e.ci.low, 0.0, 1e-15 * e.mean);
    EXPECT_NEAR(e.mean, std::pow(r.norms.front(), e.order), 1e-12 * e.mean);
  }
}

TEST(Moments, JensenOrdering) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::gamma(1.0, 4.0)});
  cfg.moment_orders = {1, 2, 3};
  const auto r = mc_solution_moments(cfg);
  ASSERT_EQ(r.estimates.size(), 3u);
  EXPECT_GE(r.estimates[1].mean, r.estimates[0].mean * r.estimates[0].mean);
  EXPECT_GE(std::pow(r.estimates[2].mean, 1.0 / 3.0), std::sqrt(r.estimates[1].mean));
  EXPECT_TRUE(r.failures.empty());
}

TEST(Moments, BoundDominatesEstimateForPurePoisson) {
  auto cfg = small_config({0.0, 0.0, JumpMeasure::gamma(1.0, 4.0)});
  cfg.moment_orders = {1, 2};
  const auto r = mc_solution_moments(cfg);
  for (const auto& e : r.estimates) {
    ASSERT_TRUE(std::isfinite(e.bound)) << e.bound_note;
    EXPECT_GE(e.bound, e.ci.high);
  }
}

TEST(Moments, IndependentOfWorkerCount) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::bigamma(1.0, 2.0)}, 12);
  const auto one = mc_solution_moments(cfg);
  cfg.workers = 3;
  const auto three = mc_solution_moments(cfg);
  EXPECT_EQ(one.norms, three.norms);
}

TEST(Tails, EmpiricalStartsAtOneAndDecreases) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::gamma(1.0, 4.0)}, 40);
  cfg.tail_thresholds = {0.0, 0.5, 1.0, 2.0, 4.0};
  const auto r = tail_study(cfg);
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_EQ(r.rows[0].empirical, 1.0);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_LE(r.rows[i].empirical, r.rows[i - 1].empirical);
    EXPECT_LE(r.rows[i].union_bound, r.rows[i - 1].union_bound + 1e-15);
  }
  for (const auto& row : r.rows) {
    EXPECT_LE(row.union_bound, 1.0);
    EXPECT_GE(row.talagrand, 0.0);
  }
  EXPECT_EQ(r.sup_total.size(), 40u);
}

TEST(Tails, ChernovDominatesPoissonSupremum) {
  auto cfg = small_config({1.0, 0.0, JumpMeasure::discrete({{1.0, 1.0}})}, 200);
  cfg.tail_thresholds = {0.0, 1.0, 2.0, 3.0, 4.0};
  const auto r = tail_study(cfg);
  for (const auto& row : r.rows) {
    const double se = std::sqrt(row.empirical_poisson * (1.0 - row.empirical_poisson) / 200.0);
    EXPECT_GE(row.chernov + 3.0 * se, row.empirical_poisson) << row.threshold;
    EXPECT_GE(row.chernov_legendre + 3.0 * se, row.empirical_poisson) << row.threshold;
  }
}

TEST(Cutoff, ReferenceMustExceedSweep) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::gamma(1.0, 4.0)}, 4);
  cfg.cutoff_paddings = {0.5, 1.0, 2.0, 4.0};
  cfg.reference_padding = 4.0;
  EXPECT_THROW(cutoff_rate_study(cfg), Error);
}

TEST(Cutoff, ErrorsMonotoneInPadding) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::gamma(1.0, 4.0)}, 6);
  cfg.cutoff_paddings = {0.5, 1.0, 2.0, 4.0};
  const auto r = cutoff_rate_study(cfg);
  ASSERT_EQ(r.mean_field_errors.size(), 4u);
  for (std::size_t i = 1; i < r.mean_field_errors.size(); ++i) {
    EXPECT_LE(r.mean_field_errors[i], r.mean_field_errors[i - 1]);
    EXPECT_LE(r.mean_solution_errors[i], r.mean_solution_errors[i - 1]);
  }
}

TEST(Cutoff, ErrorsDecayWithDistance) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::null()}, 6);
  cfg.cutoff_paddings = {1.0, 2.0, 3.0, 4.0};
  const auto r = cutoff_rate_study(cfg);
  EXPECT_LT(r.field_fit.slope, 0.0);
  EXPECT_EQ(r.field_errors.size(), 6u);
  for (const auto& row : r.field_errors) {
    for (double v : row) EXPECT_GE(v, 0.0);
  }
}

TEST(Kl, ErrorsAndRemaindersDecrease) {
  auto cfg = small_config({0.0, 1.0, JumpMeasure::null()}, 8);
  cfg.problem.kernel = {2.0, 1.0, 1};
  cfg.truncation_orders = {4, 8, 16, 32};
  const auto r = kl_rate_study(cfg);
  ASSERT_EQ(r.kappa.size(), 4u);
  EXPECT_GE(r.rank, 32);
  for (std::size_t i = 1; i < r.kappa.size(); ++i) {
    EXPECT_LE(r.kappa[i], r.kappa[i - 1]);
    EXPECT_LT(r.mean_field_errors[i], r.mean_field_errors[i - 1]);
  }
  EXPECT_LT(r.fit.slope, 0.0);
}

}  // namespace
}  // namespace levyfield
