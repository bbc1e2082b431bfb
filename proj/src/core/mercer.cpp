// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/mercer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "levyfield/error.hpp"
#include "levyfield/stats.hpp"

namespace levyfield {
namespace {

double node_distance(const std::array<double, 2>& a, const std::array<double, 2>& b, int d) {
  return d == 1 ? std::abs(a[0] - b[0]) : std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::vector<std::pair<double, double>> axis_rule(NodeRule rule, int n, double a, double b) {
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(n));
  if (rule == NodeRule::kMidpoint) {
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) out[i] = {a + (i + 0.5) * h, h};
  } else {
    auto [x, w] = gauss_legendre(n, a, b);
    for (int i = 0; i < n; ++i) out[i] = {x[i], w[i]};
  }
  return out;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre needs n >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (a + b) + 0.5 * (b - a) * es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    w[i] = (b - a) * v0 * v0;  // 2 v0^2 scaled by (b - a)/2
  }
  return {x, w};
}

bool MercerBasis::cluster_aligned(int order) const {
  for (const auto& [first, last] : clusters) {
    if (order > first && order <= last) return false;
  }
  return true;
}

Eigen::MatrixXd MercerBasis::scaled_eigenfunctions(const std::vector<std::array<double, 2>>& pts,
                                                   int count) const {
  require(count >= 0 && count <= rank, "eigenfunction count exceeds the basis rank");
  const int d = box.d;
  Eigen::MatrixXd kx(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      kx(a, j) = matern_eval(kernel, node_distance(pts[a], nodes[j], d)) * weights[j];
    }
  }
  return kx * eigenfunctions.leftCols(count);
}

Eigen::MatrixXd MercerBasis::eigenfunctions_at(const std::vector<std::array<double, 2>>& pts,
                                               int count) const {
  Eigen::MatrixXd s = scaled_eigenfunctions(pts, count);
  for (int i = 0; i < count; ++i) s.col(i) /= eigenvalues[i];
  return s;
}

Eigen::MatrixXd MercerBasis::gram(int count) const {
  const auto E = eigenfunctions.leftCols(count);
  return E.transpose() * weights.asDiagonal() * E;
}

Eigen::MatrixXd MercerBasis::reconstruct(int count) const {
  const auto E = eigenfunctions.leftCols(count);
  return E * eigenvalues.head(count).asDiagonal() * E.transpose();
}

MercerBasis nystrom_eig(const MaternKernel& k, const Box& box, std::array<int, 2> nodes_per_axis,
                        const MercerOptions& opts) {
  k.validate();
  box.validate();
  require(k.d == box.d, "kernel and box dimensions differ");
  require(nodes_per_axis[0] >= 2 && (box.d == 1 || nodes_per_axis[1] >= 2),
          "Nystrom discretization needs at least 2 nodes per axis");
  MercerBasis b;
  b.kernel = k;
  b.box = box;
  b.nodes_per_axis = nodes_per_axis;
  if (box.d == 1) b.nodes_per_axis[1] = 1;
  b.rule = opts.rule;

  const auto r0 = axis_rule(opts.rule, nodes_per_axis[0], box.lower[0], box.upper[0]);
  std::vector<double> w;
  if (box.d == 1) {
    for (const auto& [x, wx] : r0) {
      b.nodes.push_back({x, 0.0});
      w.push_back(wx);
    }
  } else {
    const auto r1 = axis_rule(opts.rule, nodes_per_axis[1], box.lower[1], box.upper[1]);
    for (const auto& [x, wx] : r0) {
      for (const auto& [y, wy] : r1) {
        b.nodes.push_back({x, y});
        w.push_back(wx * wy);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(b.nodes.size());
  b.weights = Eigen::Map<Eigen::VectorXd>(w.data(), n);
  const Eigen::VectorXd sw = b.weights.cwiseSqrt();

  // Symmetric W^{1/2} K W^{1/2}. Kernel values are memoized by distance since
  // tensor lattices repeat them.
  std::map<double, double> memo;
  auto kval = [&](double r) {
    auto it = memo.find(r);
    if (it != memo.end()) return it->second;
    const double v = matern_eval(k, r);
    memo.emplace(r, v);
    return v;
  };
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = sw[i] * kval(node_distance(b.nodes[i], b.nodes[j], box.d)) * sw[j];
      A(i, j) = v;
      A(j, i) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    const double res = (A * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal()).norm();
    std::ostringstream os;
    os << "Nystrom eigensolver did not converge (residual norm " << res << ")";
    fail(ErrorCode::kConvergence, os.str());
  }
  // Eigen returns ascending order.
  b.eigenvalues.resize(n);
  b.eigenfunctions.resize(n, n);
  const Eigen::VectorXd inv_sw = sw.cwiseInverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;
    b.eigenvalues[i] = es.eigenvalues()[src];
    Eigen::VectorXd v = inv_sw.cwiseProduct(es.eigenvectors().col(src));
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(v[j]) > 1e-12 * v.cwiseAbs().maxCoeff()) {
        if (v[j] < 0.0) v = -v;
        break;
      }
    }
    b.eigenfunctions.col(i) = v;
  }
  const double l1 = b.eigenvalues[0];
  require(l1 > 0.0, "Nystrom operator has no positive eigenvalue", ErrorCode::kInternal);
  b.min_raw_ratio = b.eigenvalues[n - 1] / l1;
  b.rank = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (b.eigenvalues[i] < opts.clip * l1) {
      b.eigenvalues[i] = 0.0;
    } else {
      ++b.rank;
    }
  }
  for (int i = 0; i + 1 < b.rank;) {
    int j = i;
    while (j + 1 < b.rank &&
           std::abs(b.eigenvalues[j] - b.eigenvalues[j + 1]) <= opts.cluster_tol * b.eigenvalues[j]) {
      ++j;
    }
    if (j > i) b.clusters.emplace_back(i, j);
    i = j + 1;
  }
  return b;
}

std::vector<double> remainder_bounds(const MercerBasis& basis, const std::vector<int>& orders,
                                     const Box& region) {
  std::vector<Eigen::Index> rows;
  for (std::size_t j = 0; j < basis.nodes.size(); ++j) {
    if (region.contains(basis.nodes[j])) rows.push_back(static_cast<Eigen::Index>(j));
  }
  require(!rows.empty(), "no Nystrom nodes inside the region D");
  for (int o : orders) {
    require(o >= 1 && o <= basis.rank, "truncation order must lie in [1, rank]");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd ed(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) ed.row(static_cast<Eigen::Index>(r)) = basis.eigenfunctions.row(rows[r]);
  std::vector<double> out;
  out.reserve(orders.size());
  for (int order : orders) {
    const Eigen::Index tail = basis.rank - order;
    if (tail == 0) {
      out.push_back(0.0);
      continue;
    }
    const Eigen::MatrixXd left = ed.middleCols(order, tail) * basis.eigenvalues.segment(order, tail).asDiagonal();
    const Eigen::MatrixXd rem = left * basis.eigenfunctions.middleCols(order, tail).transpose();
    out.push_back(rem.cwiseAbs().maxCoeff());
  }
  return out;
}

TruncatedKernel truncate(std::shared_ptr<const MercerBasis> basis, int order, const Box& region) {
  require(basis != nullptr, "truncate: null basis");
  require(order >= 1 && order <= basis->rank, "truncation order must lie in [1, rank]");
  TruncatedKernel tk;
  tk.order = order;
  tk.kappa = remainder_bounds(*basis, {order}, region)[0];
  tk.basis = std::move(basis);
  return tk;
}

TruncatedFieldEvaluator::TruncatedFieldEvaluator(std::shared_ptr<const MercerBasis> basis,
                                                 const CellGrid& noise_grid, const EvalGrid& eval,
                                                 int max_order)
    : basis_(std::move(basis)), grid_(noise_grid), eval_(eval), max_order_(max_order) {
  require(basis_ != nullptr, "null Mercer basis");
  require(max_order >= 1 && max_order <= basis_->rank, "truncation order must lie in [1, rank]");
  const auto& b = *basis_;
  const bool collocated = b.rule == NodeRule::kMidpoint && noise_grid.box == b.box &&
                          noise_grid.cells[0] == b.nodes_per_axis[0] &&
                          (b.box.d == 1 || noise_grid.cells[1] == b.nodes_per_axis[1]);
  const auto ncell = static_cast<Eigen::Index>(noise_grid.size());
  if (collocated) {
    on_cells_ = b.eigenfunctions.leftCols(max_order);
  } else {
    std::vector<std::array<double, 2>> centers;
    std::vector<Eigen::Index> inside;
    for (std::size_t j = 0; j < noise_grid.size(); ++j) {
      const auto c = noise_grid.center(j);
      if (b.box.contains(c)) {
        centers.push_back(c);
        inside.push_back(static_cast<Eigen::Index>(j));
      }
    }
    on_cells_ = Eigen::MatrixXd::Zero(ncell, max_order);
    if (!centers.empty()) {
      const Eigen::MatrixXd e = b.eigenfunctions_at(centers, max_order);
      for (std::size_t r = 0; r < inside.size(); ++r) on_cells_.row(inside[r]) = e.row(static_cast<Eigen::Index>(r));
    }
  }
  scaled_eval_ = b.scaled_eigenfunctions(eval.nodes, max_order);
}

Eigen::VectorXd TruncatedFieldEvaluator::coefficients(const NoiseRealization& z) const {
  require(z.grid == grid_, "noise grid incompatible with the truncated field evaluator");
  Eigen::VectorXd c(max_order_);
  std::vector<double> col(grid_.size());
  for (int i = 0; i < max_order_; ++i) {
    for (std::size_t j = 0; j < col.size(); ++j) col[j] = on_cells_(static_cast<Eigen::Index>(j), i);
    c[i] = apply_functional(z, col);
  }
  return c;
}

std::vector<double> TruncatedFieldEvaluator::field(const Eigen::VectorXd& coefficients, int order) const {
  require(order >= 1 && order <= max_order_ && coefficients.size() >= order,
          "truncated field order out of range");
  const Eigen::VectorXd v = scaled_eval_.leftCols(order) * coefficients.head(order);
  return std::vector<double>(v.data(), v.data() + v.size());
}

FieldRealization TruncatedFieldEvaluator::evaluate(const NoiseRealization& z, int order) const {
  FieldRealization fr;
  fr.grid = eval_;
  fr.kernel = basis_->kernel;
  fr.noise_box = grid_.box;
  fr.seed = z.seed;
  fr.values = field(coefficients(z), order);
  // The expansion does not split into parts; the total is kept in `gaussian`.
  fr.gaussian = fr.values;
  fr.jump.assign(fr.values.size(), 0.0);
  fr.drift.assign(fr.values.size(), 0.0);
  return fr;
}

FieldRealization truncated_field(const TruncatedKernel& tk, const NoiseRealization& z,
                                 const EvalGrid& eval) {
  return TruncatedFieldEvaluator(tk.basis, z.grid, eval, tk.order).evaluate(z, tk.order);
}

DecayReport eig_decay_report(const MercerBasis& basis, int j_lo, int j_hi, double eps) {
  require(basis.rank >= 20, "eigenvalue decay report needs rank >= 20");
  require(j_lo >= 1 && j_hi > j_lo + 1 && j_hi <= basis.rank, "invalid decay window");
  std::vector<double> x, y;
  for (int j = j_lo; j <= j_hi; ++j) {
    x.push_back(std::log(static_cast<double>(j)));
    y.push_back(std::log(basis.eigenvalues[j - 1]));
  }
  const LineFit f = fit_line(x, y);
  DecayReport r;
  r.slope = f.slope;
  r.intercept = f.intercept;
  r.r2 = f.r2;
  r.j_lo = j_lo;
  r.j_hi = j_hi;
  r.eps = eps;
  const double expo = basis.kernel.alpha / basis.kernel.d - 0.5 - eps;
  for (int j = 1; j <= basis.rank / 2; ++j) {
    const double sup = basis.eigenfunctions.col(j - 1).cwiseAbs().maxCoeff();
    r.product_bound = std::max(r.product_bound,
                               std::sqrt(basis.eigenvalues[j - 1]) * sup * std::pow(j, expo));
  }
  return r;
}

}  // namespace levyfield
