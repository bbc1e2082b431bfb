// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/fem.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyfield/error.hpp"

namespace levyfield {
namespace {

constexpr double kPi = 3.14159265358979323846;

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct LocalForms {
  int nv = 2;
  double measure = 0.0;
  // Gradients of the local basis functions (constant per element).
  std::array<std::array<double, 2>, 3> grad{};
  double stiff[3][3] = {};  // int grad phi_i . grad phi_j (a = 1)
  double mass[3][3] = {};   // int phi_i phi_j
};

LocalForms local_forms(const Mesh& mesh, std::size_t e) {
  LocalForms L;
  const auto& el = mesh.elements[e];
  if (mesh.d == 1) {
    L.nv = 2;
    const double h = mesh.vertices[el[1]][0] - mesh.vertices[el[0]][0];
    L.measure = h;
    L.grad[0] = {-1.0 / h, 0.0};
    L.grad[1] = {1.0 / h, 0.0};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        L.stiff[i][j] = (i == j ? 1.0 : -1.0) / h;
        L.mass[i][j] = h * (i == j ? 2.0 : 1.0) / 6.0;
      }
    }
    return L;
  }
  L.nv = 3;
  const auto& p0 = mesh.vertices[el[0]];
  const auto& p1 = mesh.vertices[el[1]];
  const auto& p2 = mesh.vertices[el[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  L.measure = 0.5 * std::abs(det);
  const std::array<const std::array<double, 2>*, 3> p{&p0, &p1, &p2};
  for (int i = 0; i < 3; ++i) {
    const auto& pj = *p[(i + 1) % 3];
    const auto& pk = *p[(i + 2) % 3];
    L.grad[i] = {(pj[1] - pk[1]) / det, (pk[0] - pj[0]) / det};
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      L.stiff[i][j] =
          L.measure * (L.grad[i][0] * L.grad[j][0] + L.grad[i][1] * L.grad[j][1]);
      L.mass[i][j] = L.measure * (i == j ? 2.0 : 1.0) / 12.0;
    }
  }
  return L;
}

double quadratic_form(const Mesh& mesh, const std::vector<double>& u, bool stiffness) {
  double acc = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const LocalForms L = local_forms(mesh, e);
    const auto& el = mesh.elements[e];
    for (int i = 0; i < L.nv; ++i) {
      for (int j = 0; j < L.nv; ++j) {
        acc += u[el[i]] * u[el[j]] * (stiffness ? L.stiff[i][j] : L.mass[i][j]);
      }
    }
  }
  return std::max(acc, 0.0);
}

std::vector<double> element_means(const Mesh& mesh, const std::vector<double>& a) {
  std::vector<double> out(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    const int nv = mesh.d == 1 ? 2 : 3;
    double s = 0.0;
    for (int i = 0; i < nv; ++i) s += a[el[i]];
    out[e] = s / nv;
  }
  return out;
}

void check_data(const Mesh& mesh, const FemData& data) {
  const std::size_t n = mesh.num_vertices();
  require(data.f.size() == n && data.g_dirichlet.size() == n && data.g_neumann.size() == n,
          "FEM data must carry one value per mesh vertex");
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(data.f[i]) && std::isfinite(data.g_dirichlet[i]) &&
                std::isfinite(data.g_neumann[i]),
            "FEM data must be finite");
  }
}

// Global stiffness (with coefficient) and load vector.
void assemble(const Mesh& mesh, const std::vector<double>& a_elem, const FemData& data,
              SpMat& K, Eigen::VectorXd& F) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Triplet> kt, mt;
  kt.reserve(mesh.num_elements() * 9);
  mt.reserve(mesh.num_elements() * 9);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const LocalForms L = local_forms(mesh, e);
    const auto& el = mesh.elements[e];
    for (int i = 0; i < L.nv; ++i) {
      for (int j = 0; j < L.nv; ++j) {
        kt.emplace_back(el[i], el[j], a_elem[e] * L.stiff[i][j]);
        mt.emplace_back(el[i], el[j], L.mass[i][j]);
      }
    }
  }
  K.resize(n, n);
  K.setFromTriplets(kt.begin(), kt.end());
  SpMat M(n, n);
  M.setFromTriplets(mt.begin(), mt.end());
  const Eigen::Map<const Eigen::VectorXd> f(data.f.data(), n);
  F = M * f;
  for (const auto& fc : mesh.facets) {
    if (fc.kind != BoundaryKind::kNeumann) continue;
    if (mesh.d == 1) {
      F[fc.vertices[0]] += data.g_neumann[fc.vertices[0]];
    } else {
      const double g0 = data.g_neumann[fc.vertices[0]];
      const double g1 = data.g_neumann[fc.vertices[1]];
      F[fc.vertices[0]] += fc.measure * (2.0 * g0 + g1) / 6.0;
      F[fc.vertices[1]] += fc.measure * (g0 + 2.0 * g1) / 6.0;
    }
  }
}

// 5-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 5> kGl5x{0.04691007703066800, 0.23076534494715845, 0.5,
                                      0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kGl5w{0.11846344252809454, 0.23931433524968324,
                                      0.28444444444444444, 0.23931433524968324,
                                      0.11846344252809454};

// 7-point degree-5 rule on the reference triangle (barycentric, weights sum to 1).
struct TriPoint {
  double l0, l1, l2, w;
};
const std::array<TriPoint, 7>& tri7() {
  static const std::array<TriPoint, 7> pts = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
    return std::array<TriPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, w0},
                                    {a1, b1, b1, w1},
                                    {b1, a1, b1, w1},
                                    {b1, b1, a1, w1},
                                    {a2, b2, b2, w2},
                                    {b2, a2, b2, w2},
                                    {b2, b2, a2, w2}}};
  }();
  return pts;
}

}  // namespace

Mesh Mesh::interval(double a, double b, int n, BoundarySides sides) {
  require(n >= 1, "Mesh::interval: at least one element required");
  Mesh m;
  m.d = 1;
  m.box = Box::interval(a, b);
  m.box.validate();
  m.intervals = {n, 1};
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) m.vertices.push_back({i == n ? b : a + i * h, 0.0});
  for (int i = 0; i < n; ++i) m.elements.push_back({i, i + 1, 0});
  m.facets.push_back({{0, 0}, sides[0], 1.0});
  m.facets.push_back({{n, n}, sides[1], 1.0});
  m.dirichlet.assign(m.vertices.size(), 0);
  for (const auto& f : m.facets) {
    if (f.kind == BoundaryKind::kDirichlet) m.dirichlet[f.vertices[0]] = 1;
  }
  m.validate();
  return m;
}

Mesh Mesh::rectangle(const Box& box, int nx, int ny, BoundarySides sides) {
  require(box.d == 2, "Mesh::rectangle: box must be two-dimensional");
  require(nx >= 1 && ny >= 1, "Mesh::rectangle: at least one cell per axis required");
  box.validate();
  Mesh m;
  m.d = 2;
  m.box = box;
  m.intervals = {nx, ny};
  const double hx = box.width(0) / nx;
  const double hy = box.width(1) / ny;
  auto vid = [ny](int i, int j) { return i * (ny + 1) + j; };
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      m.vertices.push_back({i == nx ? box.upper[0] : box.lower[0] + i * hx,
                            j == ny ? box.upper[1] : box.lower[1] + j * hy});
    }
  }
  const int corner_count = (nx + 1) * (ny + 1);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      m.vertices.push_back({box.lower[0] + (i + 0.5) * hx, box.lower[1] + (j + 0.5) * hy});
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int c = corner_count + i * ny + j;
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1),
                v01 = vid(i, j + 1);
      m.elements.push_back({v00, v10, c});
      m.elements.push_back({v10, v11, c});
      m.elements.push_back({v11, v01, c});
      m.elements.push_back({v01, v00, c});
    }
  }
  for (int j = 0; j < ny; ++j) {
    m.facets.push_back({{vid(0, j), vid(0, j + 1)}, sides[0], hy});
    m.facets.push_back({{vid(nx, j), vid(nx, j + 1)}, sides[1], hy});
  }
  for (int i = 0; i < nx; ++i) {
    m.facets.push_back({{vid(i, 0), vid(i + 1, 0)}, sides[2], hx});
    m.facets.push_back({{vid(i, ny), vid(i + 1, ny)}, sides[3], hx});
  }
  m.dirichlet.assign(m.vertices.size(), 0);
  for (const auto& f : m.facets) {
    if (f.kind != BoundaryKind::kDirichlet) continue;
    m.dirichlet[f.vertices[0]] = 1;
    m.dirichlet[f.vertices[1]] = 1;
  }
  m.validate();
  return m;
}

double Mesh::element_measure(std::size_t e) const { return local_forms(*this, e).measure; }

std::array<double, 2> Mesh::centroid(std::size_t e) const {
  const auto& el = elements[e];
  const int nv = d == 1 ? 2 : 3;
  std::array<double, 2> c{0.0, 0.0};
  for (int i = 0; i < nv; ++i) {
    c[0] += vertices[el[i]][0] / nv;
    c[1] += vertices[el[i]][1] / nv;
  }
  return c;
}

double Mesh::mesh_size() const {
  double h = 0.0;
  for (const auto& el : elements) {
    const int nv = d == 1 ? 2 : 3;
    for (int i = 0; i < nv; ++i) {
      for (int j = i + 1; j < nv; ++j) {
        const auto& a = vertices[el[i]];
        const auto& b = vertices[el[j]];
        h = std::max(h, std::hypot(a[0] - b[0], a[1] - b[1]));
      }
    }
  }
  return h;
}

std::vector<double> Mesh::sample(const std::function<double(double, double)>& f) const {
  std::vector<double> out(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) out[i] = f(vertices[i][0], vertices[i][1]);
  return out;
}

void Mesh::validate() const {
  require(d == 1 || d == 2, "Mesh: dimension must be 1 or 2");
  require(!elements.empty(), "Mesh: no elements");
  double dir = 0.0;
  for (const auto& f : facets) {
    if (f.kind == BoundaryKind::kDirichlet) dir += f.measure;
  }
  require(dir > 0.0, "Mesh: the Dirichlet boundary must have positive measure",
          ErrorCode::kDomain);
  for (std::size_t e = 0; e < elements.size(); ++e) {
    require(element_measure(e) > 0.0, "Mesh: degenerate element", ErrorCode::kDomain);
  }
}

FemData FemData::constant(const Mesh& mesh, double f, double g_d, double g_n) {
  FemData data;
  data.f.assign(mesh.num_vertices(), f);
  data.g_dirichlet.assign(mesh.num_vertices(), g_d);
  data.g_neumann.assign(mesh.num_vertices(), g_n);
  return data;
}

FemSolution assemble_solve(std::shared_ptr<const Mesh> mesh, const std::vector<double>& a,
                           const FemData& data) {
  require(mesh != nullptr, "assemble_solve: null mesh");
  require(a.size() == mesh->num_vertices(), "assemble_solve: one coefficient per vertex");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !std::isfinite(a[i])) {
      std::ostringstream os;
      os << "assemble_solve: coefficient " << a[i] << " at vertex " << i
         << " violates ellipticity (must be finite and > 0)";
      fail(ErrorCode::kDomain, os.str());
    }
  }
  return assemble_solve_elementwise(mesh, element_means(*mesh, a), data);
}

FemSolution assemble_solve_elementwise(std::shared_ptr<const Mesh> mesh,
                                       const std::vector<double>& a_elem,
                                       const FemData& data) {
  require(mesh != nullptr, "assemble_solve: null mesh");
  const Mesh& m = *mesh;
  require(a_elem.size() == m.num_elements(), "assemble_solve: one coefficient per element");
  for (std::size_t e = 0; e < a_elem.size(); ++e) {
    if (!(a_elem[e] > 0.0) || !std::isfinite(a_elem[e])) {
      std::ostringstream os;
      os << "assemble_solve: coefficient " << a_elem[e] << " on element " << e
         << " violates ellipticity (must be finite and > 0)";
      fail(ErrorCode::kDomain, os.str());
    }
  }
  check_data(m, data);

  SpMat K;
  Eigen::VectorXd F;
  assemble(m, a_elem, data, K, F);

  const std::size_t n = m.num_vertices();
  std::vector<int> free_index(n, -1);
  int nf = 0;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (m.dirichlet[i]) {
      u[i] = data.g_dirichlet[i];
    } else {
      free_index[i] = nf++;
    }
  }
  FemSolution sol;
  sol.mesh = mesh;
  sol.free_dofs = nf;
  if (nf > 0) {
    Eigen::VectorXd rhs(nf);
    for (std::size_t i = 0; i < n; ++i) {
      if (free_index[i] >= 0) rhs[free_index[i]] = F[i];
    }
    std::vector<Triplet> rt;
    for (int col = 0; col < K.outerSize(); ++col) {
      for (SpMat::InnerIterator it(K, col); it; ++it) {
        const int fi = free_index[it.row()];
        if (fi < 0) continue;
        const int fj = free_index[it.col()];
        if (fj >= 0) {
          rt.emplace_back(fi, fj, it.value());
        } else {
          rhs[fi] -= it.value() * u[it.col()];
        }
      }
    }
    SpMat A(nf, nf);
    A.setFromTriplets(rt.begin(), rt.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
      fail(ErrorCode::kConvergence, "assemble_solve: LDL^T factorization failed");
    }
    const auto& D = ldlt.vectorD();
    sol.pivot_ratio = D.maxCoeff() / D.minCoeff();
    if (!(D.minCoeff() > 0.0)) {
      std::ostringstream os;
      os << "assemble_solve: system not positive definite (pivot range " << D.minCoeff()
         << " .. " << D.maxCoeff() << ")";
      fail(ErrorCode::kConvergence, os.str());
    }
    Eigen::VectorXd x = ldlt.solve(rhs);
    const double rn = rhs.norm();
    auto rel_res = [&](const Eigen::VectorXd& y) {
      return rn > 0.0 ? (A * y - rhs).norm() / rn : (A * y).norm();
    };
    double res = rel_res(x);
    if (res > 1e-10) {
      x += ldlt.solve(rhs - A * x);
      res = rel_res(x);
    }
    if (!(res <= 1e-10)) {
      std::ostringstream os;
      os << "assemble_solve: relative residual " << res << " exceeds 1e-10 (pivot ratio "
         << sol.pivot_ratio << ", " << nf << " unknowns)";
      fail(ErrorCode::kConvergence, os.str());
    }
    sol.residual = res;
    for (std::size_t i = 0; i < n; ++i) {
      if (free_index[i] >= 0) u[i] = x[free_index[i]];
    }
  }
  sol.values.assign(u.data(), u.data() + u.size());
  const double l2sq = quadratic_form(m, sol.values, false);
  const double semisq = quadratic_form(m, sol.values, true);
  sol.l2 = std::sqrt(l2sq);
  sol.h1_semi = std::sqrt(semisq);
  sol.h1 = std::sqrt(l2sq + semisq);
  return sol;
}

double l2_norm(const Mesh& mesh, const std::vector<double>& values) {
  require(values.size() == mesh.num_vertices(), "l2_norm: size mismatch");
  return std::sqrt(quadratic_form(mesh, values, false));
}

double h1_seminorm(const Mesh& mesh, const std::vector<double>& values) {
  require(values.size() == mesh.num_vertices(), "h1_seminorm: size mismatch");
  return std::sqrt(quadratic_form(mesh, values, true));
}

double h1_norm(const Mesh& mesh, const std::vector<double>& values) {
  require(values.size() == mesh.num_vertices(), "h1_norm: size mismatch");
  return std::sqrt(quadratic_form(mesh, values, false) + quadratic_form(mesh, values, true));
}

FemErrors error_norms(const FemSolution& sol,
                      const std::function<double(double, double)>& u,
                      const std::function<std::array<double, 2>(double, double)>& grad_u) {
  const Mesh& m = *sol.mesh;
  double l2 = 0.0, h1 = 0.0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    const LocalForms L = local_forms(m, e);
    const auto& el = m.elements[e];
    std::array<double, 2> gh{0.0, 0.0};
    for (int i = 0; i < L.nv; ++i) {
      gh[0] += sol.values[el[i]] * L.grad[i][0];
      gh[1] += sol.values[el[i]] * L.grad[i][1];
    }
    auto accumulate = [&](double x, double y, double uh, double w) {
      const double du = u(x, y) - uh;
      const auto g = grad_u(x, y);
      const double gx = g[0] - gh[0];
      const double gy = m.d == 2 ? g[1] - gh[1] : 0.0;
      l2 += w * du * du;
      h1 += w * (gx * gx + gy * gy);
    };
    if (m.d == 1) {
      const double x0 = m.vertices[el[0]][0];
      for (std::size_t q = 0; q < kGl5x.size(); ++q) {
        const double t = kGl5x[q];
        const double uh = (1.0 - t) * sol.values[el[0]] + t * sol.values[el[1]];
        accumulate(x0 + t * L.measure, 0.0, uh, kGl5w[q] * L.measure);
      }
    } else {
      const auto& p0 = m.vertices[el[0]];
      const auto& p1 = m.vertices[el[1]];
      const auto& p2 = m.vertices[el[2]];
      for (const auto& q : tri7()) {
        const double x = q.l0 * p0[0] + q.l1 * p1[0] + q.l2 * p2[0];
        const double y = q.l0 * p0[1] + q.l1 * p1[1] + q.l2 * p2[1];
        const double uh = q.l0 * sol.values[el[0]] + q.l1 * sol.values[el[1]] +
                          q.l2 * sol.values[el[2]];
        accumulate(x, y, uh, q.w * L.measure);
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

double data_norm(const Mesh& mesh, const FemData& data) {
  check_data(mesh, data);
  std::vector<double> lift(mesh.num_vertices(), 0.0);
  for (std::size_t i = 0; i < lift.size(); ++i) {
    if (mesh.dirichlet[i]) lift[i] = data.g_dirichlet[i];
  }
  double gn = 0.0;
  for (const auto& fc : mesh.facets) {
    if (fc.kind != BoundaryKind::kNeumann) continue;
    if (mesh.d == 1) {
      const double g = data.g_neumann[fc.vertices[0]];
      gn += g * g;
    } else {
      const double g0 = data.g_neumann[fc.vertices[0]];
      const double g1 = data.g_neumann[fc.vertices[1]];
      gn += fc.measure * (g0 * g0 + g0 * g1 + g1 * g1) / 3.0;
    }
  }
  return l2_norm(mesh, data.f) + h1_norm(mesh, lift) + std::sqrt(gn);
}

double apriori_ratio(const FemSolution& sol, const std::vector<double>& a,
                     const FemData& data) {
  require(!a.empty(), "apriori_ratio: empty coefficient");
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  const double dn = data_norm(*sol.mesh, data);
  if (dn == 0.0) return 0.0;
  return sol.h1 / ((1.0 + *hi) / *lo * dn);
}

double dirichlet_apriori_constant(const Box& box) {
  box.validate();
  double s = 0.0;
  for (int i = 0; i < box.d; ++i) s += 1.0 / (box.width(i) * box.width(i));
  const double cp2 = 1.0 / (kPi * kPi * s);
  return 1.0 + cp2;
}

double galerkin_residual(const FemSolution& sol, const std::vector<double>& a,
                         const FemData& data) {
  const Mesh& m = *sol.mesh;
  require(a.size() == m.num_vertices(), "galerkin_residual: one coefficient per vertex");
  SpMat K;
  Eigen::VectorXd F;
  assemble(m, element_means(m, a), data, K, F);
  const Eigen::Map<const Eigen::VectorXd> u(sol.values.data(),
                                            static_cast<Eigen::Index>(sol.values.size()));
  const Eigen::VectorXd r = K * u - F;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    if (m.dirichlet[i]) continue;
    num = std::max(num, std::abs(r[i]));
    den = std::max(den, std::abs(F[i]));
  }
  return den > 0.0 ? num / den : num;
}

double energy_norm(const FemSolution& sol, const std::vector<double>& a) {
  const Mesh& m = *sol.mesh;
  require(a.size() == m.num_vertices(), "energy_norm: one coefficient per vertex");
  const auto ae = element_means(m, a);
  double acc = 0.0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    const LocalForms L = local_forms(m, e);
    const auto& el = m.elements[e];
    for (int i = 0; i < L.nv; ++i) {
      for (int j = 0; j < L.nv; ++j) {
        acc += ae[e] * sol.values[el[i]] * sol.values[el[j]] * L.stiff[i][j];
      }
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

double flux_norm(const Mesh& mesh, const std::vector<double>& a,
                 const std::vector<double>& u) {
  require(a.size() == mesh.num_vertices() && u.size() == mesh.num_vertices(),
          "flux_norm: one value per vertex");
  const auto ae = element_means(mesh, a);
  double acc = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const LocalForms L = local_forms(mesh, e);
    const auto& el = mesh.elements[e];
    double g[2] = {0.0, 0.0};
    for (int i = 0; i < L.nv; ++i) {
      g[0] += u[el[i]] * L.grad[i][0];
      g[1] += u[el[i]] * L.grad[i][1];
    }
    acc += L.measure * ae[e] * ae[e] * (g[0] * g[0] + g[1] * g[1]);
  }
  return std::sqrt(acc);
}

}  // namespace levyfield
