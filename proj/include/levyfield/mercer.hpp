// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "levyfield/field.hpp"
#include "levyfield/matern.hpp"
#include "levyfield/noise.hpp"

namespace levyfield {

enum class NodeRule { kMidpoint, kGaussLegendre };

struct MercerOptions {
  NodeRule rule = NodeRule::kMidpoint;
  double clip = 1e-12;         // eigenvalues below clip * lambda_1 are set to 0
  double cluster_tol = 1e-8;   // relative gap defining a degenerate cluster
};

/// Gauss–Legendre nodes and weights on [a, b] (Golub–Welsch).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b);

/// Nyström discretization of the integral operator with kernel k(x - y) on a
/// box. Eigenfunctions are stored by their nodal values and are orthonormal
/// under the quadrature inner product.
struct MercerBasis {
  MaternKernel kernel;
  Box box;
  std::array<int, 2> nodes_per_axis{0, 0};
  NodeRule rule = NodeRule::kMidpoint;
  std::vector<std::array<double, 2>> nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd eigenvalues;    // descending, clipped values set to 0
  Eigen::MatrixXd eigenfunctions; // column i holds e_i at the nodes
  int rank = 0;                   // eigenvalues kept after clipping
  double min_raw_ratio = 0.0;     // smallest raw eigenvalue / lambda_1
  std::vector<std::pair<int, int>> clusters;  // [first, last] 0-based, size >= 2

  std::size_t size() const { return nodes.size(); }
  /// True when truncating after `order` eigenpairs splits no cluster.
  bool cluster_aligned(int order) const;
  /// Column i: lambda_i e_i(x) at the points, by Nyström extension (no
  /// division by lambda_i).
  Eigen::MatrixXd scaled_eigenfunctions(const std::vector<std::array<double, 2>>& pts,
                                        int count) const;
  /// Column i: e_i(x) at the points (Nyström extension divided by lambda_i).
  Eigen::MatrixXd eigenfunctions_at(const std::vector<std::array<double, 2>>& pts,
                                    int count) const;
  /// Quadrature Gram matrix E^T W E of the first `count` eigenfunctions.
  Eigen::MatrixXd gram(int count) const;
  /// sum_{i < count} lambda_i e_i(x_a) e_i(x_b) at node pairs.
  Eigen::MatrixXd reconstruct(int count) const;
};

MercerBasis nystrom_eig(const MaternKernel& k, const Box& box,
                        std::array<int, 2> nodes_per_axis,
                        const MercerOptions& opts = {});

/// Truncated expansion of order N' with the remainder bound
/// kappa = max_{x in D nodes, y in all nodes} |sum_{i > N'} lambda_i e_i(x) e_i(y)|.
struct TruncatedKernel {
  std::shared_ptr<const MercerBasis> basis;
  int order = 0;
  double kappa = 0.0;
};

TruncatedKernel truncate(std::shared_ptr<const MercerBasis> basis, int order,
                         const Box& region);

/// Remainder bounds for several orders at once (one pass over the tail).
std::vector<double> remainder_bounds(const MercerBasis& basis, const std::vector<int>& orders,
                                     const Box& region);

/// Evaluates the finite-dimensional field x -> sum_{i<=N'} lambda_i e_i(x) Z(e_i).
/// Reuses the eigenfunction samples for a fixed noise grid and evaluation grid.
class TruncatedFieldEvaluator {
 public:
  TruncatedFieldEvaluator(std::shared_ptr<const MercerBasis> basis, const CellGrid& noise_grid,
                          const EvalGrid& eval, int max_order);

  /// Z(e_i) for i < max_order.
  Eigen::VectorXd coefficients(const NoiseRealization& z) const;
  /// Field values for the first `order` terms given precomputed coefficients.
  std::vector<double> field(const Eigen::VectorXd& coefficients, int order) const;
  FieldRealization evaluate(const NoiseRealization& z, int order) const;

  int max_order() const { return max_order_; }

 private:
  std::shared_ptr<const MercerBasis> basis_;
  CellGrid grid_;
  EvalGrid eval_;
  int max_order_;
  Eigen::MatrixXd on_cells_;   // e_i at noise cell centers (0 outside the box)
  Eigen::MatrixXd scaled_eval_; // lambda_i e_i at evaluation nodes
};

FieldRealization truncated_field(const TruncatedKernel& tk, const NoiseRealization& z,
                                 const EvalGrid& eval);

struct DecayReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int j_lo = 0;
  int j_hi = 0;
  /// max_j sqrt(lambda_j) ||e_j||_inf j^{alpha/d - 1/2 - eps} over j <= rank/2.
  double product_bound = 0.0;
  double eps = 0.1;
};

/// Least-squares slope of log lambda_j against log j over j in [j_lo, j_hi]
/// (1-based) and the eigenfunction product bound.
DecayReport eig_decay_report(const MercerBasis& basis, int j_lo = 5, int j_hi = 50,
                             double eps = 0.1);

}  // namespace levyfield
