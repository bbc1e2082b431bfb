// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/mercer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "levyfield/error.hpp"
#include "levyfield/stats.hpp"

namespace levyfield {
namespace {

const Box kLambda = Box::interval(-2.0, 2.0);
const Box kD = Box::interval(-0.5, 0.5);

std::shared_ptr<const MercerBasis> basis_for(double alpha, int nodes = 200) {
  return std::make_shared<const MercerBasis>(nystrom_eig({alpha, 1.0, 1}, kLambda, {nodes, 0}));
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto [x, w] = gauss_legendre(6, -1.0, 3.0);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 11);
  EXPECT_NEAR(s, (std::pow(3.0, 12) - 1.0) / 12.0, 1e-8);
}

TEST(Nystrom, FullRankReconstruction) {
  const auto b = basis_for(1.0, 120);
  ASSERT_EQ(b->rank, static_cast<int>(b->size()));
  const Eigen::MatrixXd r = b->reconstruct(b->rank);
  double worst = 0.0;
  for (std::size_t i = 0; i < b->size(); ++i) {
    for (std::size_t j = 0; j < b->size(); ++j) {
      const double k = matern_eval(b->kernel, std::abs(b->nodes[i][0] - b->nodes[j][0]));
      worst = std::max(worst, std::abs(r(i, j) - k));
    }
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(Nystrom, TraceEqualsPeakTimesVolume) {
  const auto b = basis_for(1.0);
  EXPECT_NEAR(b->eigenvalues.sum(), matern_peak(b->kernel) * kLambda.volume(), 1e-9);
}

TEST(Nystrom, GramIsIdentity) {
  const auto b = basis_for(2.0);
  const Eigen::MatrixXd g = b->gram(b->rank);
  EXPECT_LE((g - Eigen::MatrixXd::Identity(b->rank, b->rank)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Nystrom, EigenvaluesSortedAndNonnegative) {
  for (double alpha : {1.0, 2.0}) {
    const auto b = basis_for(alpha);
    EXPECT_GE(b->min_raw_ratio, -1e-10);
    for (Eigen::Index i = 0; i + 1 < b->eigenvalues.size(); ++i) {
      EXPECT_GE(b->eigenvalues[i], b->eigenvalues[i + 1]);
      EXPECT_GE(b->eigenvalues[i + 1], 0.0);
    }
  }
}

TEST(Nystrom, SignConventionFirstComponentPositive) {
  const auto b = basis_for(1.0, 60);
  for (int i = 0; i < b->rank; ++i) {
    const Eigen::VectorXd v = b->eigenfunctions.col(i);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (std::abs(v[j]) > 1e-12 * v.cwiseAbs().maxCoeff()) {
        EXPECT_GT(v[j], 0.0);
        break;
      }
    }
  }
}

TEST(Nystrom, DecaySlopeAlphaOne) {
  const auto b = basis_for(1.0);
  const auto rep = eig_decay_report(*b, 5, 50);
  EXPECT_NEAR(rep.slope, -2.0, 0.3);
  EXPECT_GE(rep.slope, -2.3);
  EXPECT_LE(rep.slope, -1.7);
  EXPECT_TRUE(std::isfinite(rep.product_bound));
}

TEST(Nystrom, DecaySlopeAlphaTwo) {
  const auto b = basis_for(2.0, 400);
  const auto rep = eig_decay_report(*b, 5, 50);
  EXPECT_GE(rep.slope, -4.4);
  EXPECT_LE(rep.slope, -3.6);
}

TEST(Nystrom, ProductSequenceBounded) {
  // sqrt(lambda_j) ||e_j||_inf j^{alpha/d - 1/2 - 0.1} stays bounded for j <= rank / 2.
  const auto b = basis_for(1.0, 300);
  const auto rep = eig_decay_report(*b, 5, 50, 0.1);
  double late = 0.0;
  for (int j = b->rank / 4; j <= b->rank / 2; ++j) {
    const double v = std::sqrt(b->eigenvalues[j - 1]) * b->eigenfunctions.col(j - 1).cwiseAbs().maxCoeff() *
                     std::pow(j, 1.0 - 0.5 - 0.1);
    late = std::max(late, v);
  }
  EXPECT_LE(late, rep.product_bound * (1.0 + 1e-12));
  EXPECT_LT(rep.product_bound, 10.0);
}

TEST(Nystrom, GridStabilityOfLeadingEigenvalues) {
  const auto coarse = basis_for(1.0, 200);
  const auto fine = basis_for(1.0, 400);
  for (int i = 0; i < 10; ++i) {
    EXPECT_NEAR(fine->eigenvalues[i], coarse->eigenvalues[i], 0.01 * coarse->eigenvalues[i]);
  }
}

TEST(Nystrom, GaussLegendreRuleAgreesOnLeadingEigenvalues) {
  MercerOptions opts;
  opts.rule = NodeRule::kGaussLegendre;
  const auto gl = nystrom_eig({1.0, 1.0, 1}, kLambda, {200, 0}, opts);
  const auto mid = basis_for(1.0, 200);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(gl.eigenvalues[i], mid->eigenvalues[i], 1e-3 * mid->eigenvalues[i]);
}

TEST(Nystrom, RejectsTooFewNodes) {
  EXPECT_THROW(nystrom_eig({1.0, 1.0, 1}, kLambda, {1, 0}), Error);
  EXPECT_THROW(nystrom_eig({1.0, 1.0, 2}, kLambda, {10, 0}), Error);
}

TEST(Truncate, FullRankHasNoRemainder) {
  const auto b = basis_for(1.0, 100);
  EXPECT_LE(truncate(b, b->rank, kD).kappa, 1e-8);
  EXPECT_THROW(truncate(b, 0, kD), Error);
  EXPECT_THROW(truncate(b, b->rank + 1, kD), Error);
}

TEST(Truncate, RemainderNonincreasing) {
  const auto b = basis_for(2.0);
  std::vector<int> orders;
  for (int n = 1; n <= 80; ++n) if (b->cluster_aligned(n)) orders.push_back(n);
  const auto kappa = remainder_bounds(*b, orders, kD);
  for (std::size_t i = 1; i < kappa.size(); ++i) EXPECT_LE(kappa[i], kappa[i - 1] * (1.0 + 1e-9));
}

TEST(Truncate, RemainderRateAlphaTwo) {
  const auto b = basis_for(2.0, 400);
  std::vector<int> orders;
  std::vector<double> x;
  for (int n = 5; n <= 50; n += 5) orders.push_back(n);
  const auto kappa = remainder_bounds(*b, orders, kD);
  for (int n : orders) x.push_back(n);
  const auto fit = fit_rate(x, kappa);
  EXPECT_LE(fit.slope, -(2.0 * 2.0 / 1.0 - 2.0) + 0.3);
}

TEST(Truncate, ReconstructionErrorDecreasesToZero) {
  const auto b = basis_for(1.0, 80);
  const Eigen::MatrixXd full = b->reconstruct(b->rank);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 5; n <= b->rank; n += 5) {
    const double err = (full - b->reconstruct(n)).cwiseAbs().maxCoeff();
    EXPECT_LE(err, prev * (1.0 + 1e-9));
    prev = err;
  }
  EXPECT_LE(prev, 1e-10);
}

TEST(Truncate, KernelAndRemainderAreOrthogonal) {
  const auto b = basis_for(1.0, 150);
  const int n = 12;
  const Eigen::Index m = static_cast<Eigen::Index>(b->size());
  const Eigen::MatrixXd& e = b->eigenfunctions;
  const Eigen::MatrixXd kn = e.leftCols(n) * b->eigenvalues.head(n).asDiagonal() * e.leftCols(n).transpose();
  const Eigen::MatrixXd rn = e.middleCols(n, b->rank - n) *
                             b->eigenvalues.segment(n, b->rank - n).asDiagonal() *
                             e.middleCols(n, b->rank - n).transpose();
  const Eigen::MatrixXd inner = kn * b->weights.asDiagonal() * rn;
  EXPECT_LE(inner.cwiseAbs().maxCoeff(), 1e-8);
  (void)m;
}

TEST(TruncatedField, FullRankMatchesDirectSmoothing) {
  const MaternKernel k{1.0, 1.0, 1};
  const int cells = 160;
  const CellGrid grid{kLambda, {cells, 1}};
  const auto b = std::make_shared<const MercerBasis>(nystrom_eig(k, kLambda, {cells, 0}));
  ASSERT_EQ(b->rank, cells);
  const auto eval = EvalGrid::lattice(kD, {16, 1});
  const auto z = sample_noise({0.0, 1.0, JumpMeasure::null()}, grid, 3);
  const auto tf = truncated_field(truncate(b, b->rank, kD), z, eval);
  SmoothingOptions so;
  so.require_padding = false;
  FieldSmoother sm(k, grid, eval, so);
  const auto direct = sm.gaussian_part(z.gaussian_cells);
  for (std::size_t i = 0; i < eval.size(); ++i) EXPECT_NEAR(tf.values[i], direct[i], 1e-6);
}

TEST(TruncatedField, CoefficientsAreWhite) {
  const MaternKernel k{2.0, 1.0, 1};
  const CellGrid grid{kLambda, {100, 1}};
  const auto b = std::make_shared<const MercerBasis>(nystrom_eig(k, kLambda, {100, 0}));
  const auto eval = EvalGrid::lattice(kD, {4, 1});
  const int order = 4;
  TruncatedFieldEvaluator ev(b, grid, eval, order);
  NoiseSampler sampler({0.0, 1.0, JumpMeasure::null()}, grid);
  const std::size_t n = 5000;
  std::vector<std::vector<double>> c(order);
  for (std::size_t s = 0; s < n; ++s) {
    const auto v = ev.coefficients(sampler.sample(derive_seed(50, s)));
    for (int i = 0; i < order; ++i) c[i].push_back(v[i]);
  }
  for (int i = 0; i < order; ++i) {
    for (int j = i; j < order; ++j) {
      std::vector<double> p(n);
      for (std::size_t s = 0; s < n; ++s) p[s] = c[i][s] * c[j][s];
      const auto sm = summarize(p);
      EXPECT_NEAR(sm.mean, i == j ? 1.0 : 0.0, 3.0 * sm.std_error()) << i << "," << j;
    }
  }
}

TEST(TruncatedField, IncompatibleGridRejected) {
  const auto b = basis_for(1.0, 50);
  const auto eval = EvalGrid::lattice(kD, {4, 1});
  TruncatedFieldEvaluator ev(b, CellGrid{kLambda, {50, 1}}, eval, 5);
  const auto z = sample_noise({0.0, 1.0, JumpMeasure::null()}, CellGrid{kLambda, {40, 1}}, 1);
  EXPECT_THROW(ev.coefficients(z), Error);
}

TEST(Clusters, AlignmentQueries) {
  // The 2D square has degenerate pairs from the x <-> y symmetry.
  const auto b = nystrom_eig({2.0, 1.0, 2}, Box::rectangle(-1.0, 1.0, -1.0, 1.0), {16, 16});
  ASSERT_FALSE(b.clusters.empty());
  const auto [first, last] = b.clusters.front();
  EXPECT_FALSE(b.cluster_aligned(first + 1));
  EXPECT_TRUE(b.cluster_aligned(last + 1));
}

}  // namespace
}  // namespace levyfield
