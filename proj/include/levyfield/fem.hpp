// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "levyfield/noise.hpp"

namespace levyfield {

enum class BoundaryKind { kDirichlet, kNeumann };

/// Boundary kind per side: {x = x0, x = x1, y = y0, y = y1}. 1D meshes use
/// the first two entries.
using BoundarySides = std::array<BoundaryKind, 4>;

inline BoundarySides all_dirichlet() {
  return {BoundaryKind::kDirichlet, BoundaryKind::kDirichlet, BoundaryKind::kDirichlet,
          BoundaryKind::kDirichlet};
}

struct BoundaryFacet {
  std::array<int, 2> vertices{0, 0};  // 1D: a single vertex, repeated
  BoundaryKind kind = BoundaryKind::kDirichlet;
  double measure = 0.0;               // facet length (1 in 1D)
};

/// P1 mesh of an interval or a rectangle. Rectangles use the crossed-diagonal
/// triangulation: each cell is split into four right triangles meeting at an
/// added center vertex.
struct Mesh {
  int d = 1;
  Box box;
  std::array<int, 2> intervals{1, 1};
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> elements;  // 1D uses the first two entries
  std::vector<BoundaryFacet> facets;
  std::vector<char> dirichlet;               // per vertex

  static Mesh interval(double a, double b, int n, BoundarySides sides = all_dirichlet());
  static Mesh rectangle(const Box& box, int nx, int ny,
                        BoundarySides sides = all_dirichlet());

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_elements() const { return elements.size(); }
  /// Segment length or triangle area.
  double element_measure(std::size_t e) const;
  std::array<double, 2> centroid(std::size_t e) const;
  /// Largest element diameter.
  double mesh_size() const;
  std::vector<double> sample(const std::function<double(double, double)>& f) const;
  void validate() const;
};

/// Nodal data: source f, Dirichlet values g_D (read on Dirichlet vertices)
/// and Neumann flux g_N (read on Neumann facets).
struct FemData {
  std::vector<double> f;
  std::vector<double> g_dirichlet;
  std::vector<double> g_neumann;

  static FemData constant(const Mesh& mesh, double f, double g_d = 0.0, double g_n = 0.0);
};

struct FemSolution {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> values;
  double residual = 0.0;         // relative residual of the reduced system
  double pivot_ratio = 0.0;      // max / min LDL^T pivot
  int free_dofs = 0;
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1 = 0.0;
};

/// Galerkin P1 solution of -div(a grad u) = f with u = g_D on the Dirichlet
/// part and a du/dn = g_N on the Neumann part. The coefficient is taken
/// constant per element: the mean of its vertex values.
FemSolution assemble_solve(std::shared_ptr<const Mesh> mesh, const std::vector<double>& a,
                           const FemData& data);

/// Same with one coefficient value per element.
FemSolution assemble_solve_elementwise(std::shared_ptr<const Mesh> mesh,
                                       const std::vector<double>& a_elem,
                                       const FemData& data);

/// Exact norms of the piecewise-linear interpolant of `values`.
double l2_norm(const Mesh& mesh, const std::vector<double>& values);
double h1_seminorm(const Mesh& mesh, const std::vector<double>& values);
double h1_norm(const Mesh& mesh, const std::vector<double>& values);
inline double l2_norm(const FemSolution& s) { return s.l2; }
inline double h1_norm(const FemSolution& s) { return s.h1; }

struct FemErrors {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

/// ||u - u_h|| against an exact solution, by a 7-point (2D) or 5-point (1D)
/// Gauss rule per element.
FemErrors error_norms(const FemSolution& sol,
                      const std::function<double(double, double)>& u,
                      const std::function<std::array<double, 2>(double, double)>& grad_u);

/// ||f||_{L^2} + ||E g_D||_{H^1} + ||g_N||_{L^2(Neumann)}, with E the
/// zero-extension of the nodal Dirichlet data.
double data_norm(const Mesh& mesh, const FemData& data);

/// ||u||_{H^1} / [ (1 + max a) / min a * data_norm ].
double apriori_ratio(const FemSolution& sol, const std::vector<double>& a, const FemData& data);

/// Constant 1 + C_P^2 of the a priori bound for homogeneous Dirichlet data on
/// the whole boundary of a box, C_P = 1 / (pi sqrt(sum_i L_i^{-2})).
double dirichlet_apriori_constant(const Box& box);

/// max_i |a(u_h, phi_i) - l(phi_i)| / max_i |l(phi_i)| over the free basis
/// functions.
double galerkin_residual(const FemSolution& sol, const std::vector<double>& a,
                         const FemData& data);

/// Energy norm (int a |grad u|^2)^{1/2} with elementwise mean coefficient.
double energy_norm(const FemSolution& sol, const std::vector<double>& a);

/// (int abar^2 |grad u|^2)^{1/2}, abar the element mean of the nodal `a`.
double flux_norm(const Mesh& mesh, const std::vector<double>& a, const std::vector<double>& u);

}  // namespace levyfield
