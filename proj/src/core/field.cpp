// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/field.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "levyfield/error.hpp"
#include "levyfield/quadrature.hpp"

namespace levyfield {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(const std::array<double, 2>& a, const std::array<double, 2>& b, int d) {
  return d == 1 ? std::abs(a[0] - b[0]) : std::hypot(a[0] - b[0], a[1] - b[1]);
}

// Angular measure of the circle of radius r about x that lies inside box.
double arc_inside(const Box& box, const std::array<double, 2>& x, double r) {
  std::vector<double> cuts{-kPi, kPi};
  auto add = [&](double c, double shift) {
    if (c > -1.0 && c < 1.0) {
      const double a = std::acos(c);
      for (double t : {shift + a, shift - a}) {
        t = std::remainder(t, 2.0 * kPi);
        cuts.push_back(t);
      }
    }
  };
  add((box.lower[0] - x[0]) / r, 0.0);
  add((box.upper[0] - x[0]) / r, 0.0);
  add((box.lower[1] - x[1]) / r, 0.5 * kPi);
  add((box.upper[1] - x[1]) / r, 0.5 * kPi);
  std::sort(cuts.begin(), cuts.end());
  double inside = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const double t = 0.5 * (cuts[i] + cuts[i + 1]);
    const double px = x[0] + r * std::cos(t), py = x[1] + r * std::sin(t);
    if (px >= box.lower[0] && px <= box.upper[0] && py >= box.lower[1] &&
        py <= box.upper[1]) {
      inside += len;
    }
  }
  return inside;
}

// int_{box} k(x - y) dy.
double kernel_box_mass(const MaternKernel& k, const Box& box,
                       const std::array<double, 2>& x, double r_cut) {
  QuadratureOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-10;
  auto kr = [&](double t) { return matern_eval(k, std::abs(t)); };
  if (box.d == 1) {
    // Split at 0 where the kernel may have a cusp.
    const double a = std::max(box.lower[0] - x[0], -r_cut);
    const double b = std::min(box.upper[0] - x[0], r_cut);
    if (!(b > a)) return 0.0;
    if (a < 0.0 && b > 0.0) return quad(kr, a, 0.0, o) + quad(kr, 0.0, b, o);
    return quad(kr, a, b, o);
  }
  std::vector<double> br{0.0};
  for (int ax = 0; ax < 2; ++ax) {
    br.push_back(std::abs(box.lower[ax] - x[ax]));
    br.push_back(std::abs(box.upper[ax] - x[ax]));
  }
  for (double cx : {box.lower[0], box.upper[0]}) {
    for (double cy : {box.lower[1], box.upper[1]}) br.push_back(std::hypot(cx - x[0], cy - x[1]));
  }
  std::sort(br.begin(), br.end());
  const double r_max = std::min(br.back(), r_cut);
  auto f = [&](double r) { return r > 0.0 ? r * matern_eval(k, r) * arc_inside(box, x, r) : 0.0; };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double lo = br[i], hi = std::min(br[i + 1], r_max);
    if (!(hi > lo)) continue;
    // r = lo + (hi - lo)(1 - cos t)/2 removes the square-root endpoint behavior.
    const double half = 0.5 * (hi - lo);
    auto g = [&](double t) { return f(lo + half * (1.0 - std::cos(t))) * half * std::sin(t); };
    acc += quad(g, 0.0, kPi, o);
  }
  return acc;
}

}  // namespace

EvalGrid EvalGrid::lattice(const Box& region, std::array<int, 2> intervals) {
  region.validate();
  EvalGrid g;
  g.region = region;
  require(intervals[0] >= 1 && (region.d == 1 || intervals[1] >= 1),
          "evaluation lattice needs at least one interval per axis");
  if (region.d == 1) {
    for (int i = 0; i <= intervals[0]; ++i) {
      g.nodes.push_back({region.lower[0] + region.width(0) * i / intervals[0], 0.0});
    }
  } else {
    for (int i = 0; i <= intervals[0]; ++i) {
      for (int j = 0; j <= intervals[1]; ++j) {
        g.nodes.push_back({region.lower[0] + region.width(0) * i / intervals[0],
                           region.lower[1] + region.width(1) * j / intervals[1]});
      }
    }
  }
  return g;
}

EvalGrid EvalGrid::from_nodes(const Box& region, std::vector<std::array<double, 2>> nodes) {
  region.validate();
  for (const auto& x : nodes) {
    require(region.contains(x), "evaluation node outside the region D");
  }
  EvalGrid g;
  g.region = region;
  g.nodes = std::move(nodes);
  return g;
}

void FieldRealization::sum_parts() {
  values.resize(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = drift[i] + gaussian[i] + jump[i];
}

double default_cutoff_padding(const MaternKernel& k, double n) {
  require(n >= 1.0, "cut-off level N must be >= 1");
  const double m_tilde = 0.9 * k.m;
  const double schedule = (2.0 / m_tilde) * (k.alpha / k.d - 1.0) * std::log(n);
  return std::max(decay_radius(k, 1e-8), schedule);
}

// Linear convolution of the cell values with kernel samples on the lattice of
// half cell steps, evaluated at the nodes by FFT.
struct FieldSmoother::FftPath {
  int d = 1;
  std::array<int, 2> fft_shape{0, 0};
  std::array<int, 2> cells{1, 1};
  std::array<int, 2> delta_min{0, 0};
  std::vector<std::size_t> node_offsets;  // flat output index per node
  std::vector<std::complex<double>> kernel_hat;
  std::unique_ptr<RealFft> fft;
};

FieldSmoother::FieldSmoother(const MaternKernel& k, const CellGrid& noise_grid,
                             const EvalGrid& eval, const SmoothingOptions& opts)
    : k_(k), grid_(noise_grid), eval_(eval), opts_(opts) {
  k.validate();
  noise_grid.validate();
  const int d = noise_grid.box.d;
  require(k.d == d && eval.region.d == d, "kernel, noise and evaluation dimensions differ");
  require(!eval.nodes.empty(), "evaluation grid has no nodes");
  if (opts.require_padding) {
    const double pad = decay_radius(k, opts.pad_tol);
    const Box needed = eval.region.padded(pad);
    if (!noise_grid.box.contains(needed)) {
      std::ostringstream os;
      os << "noise cut-off box does not contain D padded by the kernel decay radius "
         << pad << " (level " << opts.pad_tol
         << "); exponential cut-off accuracy requires this padding";
      fail(ErrorCode::kDomain, os.str());
    }
  }
  const double peak = matern_peak(k);
  skip_radius_ = decay_radius(k, opts.skip_tol * peak);

  kernel_mass_.resize(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) {
    kernel_mass_[i] = kernel_box_mass(k, noise_grid.box, eval.nodes[i], skip_radius_);
  }

  // Map nodes onto the half-step lattice of the noise grid when possible.
  std::vector<std::array<int, 2>> pos(eval.size(), {0, 0});
  bool aligned = true;
  std::array<int, 2> pmin{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  std::array<int, 2> pmax{std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
  for (std::size_t i = 0; i < eval.size() && aligned; ++i) {
    for (int a = 0; a < d; ++a) {
      const double u = (eval.nodes[i][a] - noise_grid.box.lower[a]) / (0.5 * noise_grid.spacing(a));
      const double r = std::round(u);
      if (std::abs(u - r) > 1e-7 || r < 0.0 || r > 2.0 * noise_grid.cells[a]) {
        aligned = false;
        break;
      }
      pos[i][a] = static_cast<int>(r);
      pmin[a] = std::min(pmin[a], pos[i][a]);
      pmax[a] = std::max(pmax[a], pos[i][a]);
    }
  }
  if (!aligned) return;

  auto path = std::make_unique<FftPath>();
  path->d = d;
  std::array<int, 2> la{1, 1}, lk{1, 1};
  for (int a = 0; a < d; ++a) {
    const int n = noise_grid.cells[a];
    path->cells[a] = n;
    la[a] = 2 * n - 1;  // cell positions 1, 3, ..., 2n-1
    path->delta_min[a] = pmin[a] - (2 * n - 1);
    lk[a] = pmax[a] - 1 - path->delta_min[a] + 1;
    path->fft_shape[a] = fft_size_at_least(la[a] + lk[a] - 1);
  }
  const int n0 = path->fft_shape[0];
  const int n1 = d == 2 ? path->fft_shape[1] : 0;
  path->fft = std::make_unique<RealFft>(n0, n1);
  std::vector<double> kern(path->fft->real_size(), 0.0);
  const double h0 = 0.5 * noise_grid.spacing(0);
  const double h1 = d == 2 ? 0.5 * noise_grid.spacing(1) : 0.0;
  if (d == 1) {
    for (int t = 0; t < lk[0]; ++t) {
      kern[t] = matern_eval(k, std::abs((path->delta_min[0] + t) * h0));
    }
  } else {
    for (int t0 = 0; t0 < lk[0]; ++t0) {
      for (int t1 = 0; t1 < lk[1]; ++t1) {
        const double r = std::hypot((path->delta_min[0] + t0) * h0, (path->delta_min[1] + t1) * h1);
        kern[static_cast<std::size_t>(t0) * n1 + t1] = r <= skip_radius_ ? matern_eval(k, r) : 0.0;
      }
    }
  }
  path->fft->forward(kern, path->kernel_hat);
  // Output index t = p - 1 - delta_min per axis.
  path->node_offsets.resize(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) {
    const std::size_t t0 = static_cast<std::size_t>(pos[i][0] - 1 - path->delta_min[0]);
    if (d == 1) {
      path->node_offsets[i] = t0;
    } else {
      const std::size_t t1 = static_cast<std::size_t>(pos[i][1] - 1 - path->delta_min[1]);
      path->node_offsets[i] = t0 * n1 + t1;
    }
  }
  fft_ = std::move(path);
}

FieldSmoother::~FieldSmoother() = default;

std::vector<double> FieldSmoother::gaussian_part(const std::vector<double>& cells) const {
  require(cells.size() == grid_.size(), "gaussian cells do not match the noise grid");
  std::vector<double> out(eval_.size(), 0.0);
  if (fft_) {
    const auto& p = *fft_;
    std::vector<double> a(p.fft->real_size(), 0.0);
    if (p.d == 1) {
      for (int j = 0; j < p.cells[0]; ++j) a[2 * j] = cells[j];
    } else {
      const int n1 = p.fft_shape[1];
      for (int j0 = 0; j0 < p.cells[0]; ++j0) {
        for (int j1 = 0; j1 < p.cells[1]; ++j1) {
          a[static_cast<std::size_t>(2 * j0) * n1 + 2 * j1] = cells[grid_.flat_index(j0, j1)];
        }
      }
    }
    std::vector<std::complex<double>> spec;
    p.fft->forward(a, spec);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= p.kernel_hat[i];
    std::vector<double> conv;
    p.fft->backward(spec, conv);
    const double scale = 1.0 / static_cast<double>(p.fft->real_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = conv[p.node_offsets[i]] * scale;
    return out;
  }
  const int d = grid_.box.d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (cells[j] == 0.0) continue;
      const double r = distance(eval_.nodes[i], grid_.center(j), d);
      if (r <= skip_radius_) acc += cells[j] * matern_eval(k_, r);
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> FieldSmoother::jump_part(const std::vector<Atom>& atoms, bool absolute) const {
  std::vector<double> out(eval_.size(), 0.0);
  const int d = grid_.box.d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (const auto& a : atoms) {
      const double r = distance(eval_.nodes[i], a.x, d);
      if (r > skip_radius_) continue;
      acc += (absolute ? std::abs(a.s) : a.s) * matern_eval(k_, r);
    }
    out[i] = acc;
  }
  return out;
}

FieldRealization FieldSmoother::smooth(const NoiseRealization& z) const {
  require(z.grid == grid_, "noise realization grid differs from the smoother grid");
  FieldRealization fr;
  fr.grid = eval_;
  fr.kernel = k_;
  fr.noise_box = grid_.box;
  fr.seed = z.seed;
  bool any_gauss = false;
  for (double w : z.gaussian_cells) any_gauss = any_gauss || w != 0.0;
  fr.gaussian = any_gauss ? gaussian_part(z.gaussian_cells) : std::vector<double>(eval_.size(), 0.0);
  fr.jump = jump_part(z.atoms);
  fr.drift.resize(eval_.size());
  for (std::size_t i = 0; i < fr.drift.size(); ++i) fr.drift[i] = z.drift * kernel_mass_[i];
  fr.sum_parts();
  return fr;
}

FieldRealization smooth_realization(const NoiseRealization& z, const MaternKernel& k,
                                    const EvalGrid& eval, const SmoothingOptions& opts) {
  return FieldSmoother(k, z.grid, eval, opts).smooth(z);
}

namespace {
constexpr double kEps0 = 1e-3;
}

TransformSpec TransformSpec::exp() {
  TransformSpec t;
  t.kind_ = Kind::kExp;
  t.B_ = 1.0;
  t.rho_ = 1.0;
  t.h_ = 1.0;
  return t;
}

TransformSpec TransformSpec::smoothed_step(double low, double high, double width) {
  require(low > 0.0 && high > low && width > 0.0,
          "smoothed_step needs 0 < low < high and width > 0");
  TransformSpec t;
  t.kind_ = Kind::kSmoothedStep;
  t.p0_ = low;
  t.p1_ = high;
  t.p2_ = width;
  t.B_ = std::max({high, 1.0 / low, (high - low) / (4.0 * width)});
  t.rho_ = 0.0;
  t.h_ = 0.0;
  t.verify();
  return t;
}

TransformSpec TransformSpec::tempered_exp(double h, double rho) {
  require(h > 0.0 && h <= 1.0, "tempered_exp exponent h must lie in (0, 1]");
  require(rho > 0.0, "tempered_exp scale rho must be positive");
  TransformSpec t;
  t.kind_ = Kind::kTemperedExp;
  t.p0_ = h;
  t.p1_ = rho;
  t.B_ = std::max(1.0, rho * h * std::pow(kEps0, h - 1.0));
  t.rho_ = rho;
  t.h_ = h;
  t.verify();
  return t;
}

TransformSpec TransformSpec::with_bounds(double B, double rho, double h) const {
  require(B >= 1.0 && rho >= 0.0 && h >= 0.0 && h <= 1.0,
          "declared transform bounds need B >= 1, rho >= 0, h in [0, 1]");
  TransformSpec t = *this;
  t.B_ = B;
  t.rho_ = rho;
  t.h_ = h;
  t.verify();
  return t;
}

double TransformSpec::operator()(double z) const {
  switch (kind_) {
    case Kind::kExp:
      return std::exp(z);
    case Kind::kSmoothedStep:
      return p0_ + (p1_ - p0_) / (1.0 + std::exp(-z / p2_));
    case Kind::kTemperedExp: {
      const double g = std::pow(std::abs(z) + kEps0, p0_) - std::pow(kEps0, p0_);
      return std::exp(p1_ * std::copysign(g, z));
    }
  }
  return 0.0;
}

double TransformSpec::derivative(double z) const {
  switch (kind_) {
    case Kind::kExp:
      return std::exp(z);
    case Kind::kSmoothedStep: {
      const double e = std::exp(-std::abs(z) / p2_);
      return (p1_ - p0_) / p2_ * e / ((1.0 + e) * (1.0 + e));
    }
    case Kind::kTemperedExp:
      return (*this)(z) * p1_ * p0_ * std::pow(std::abs(z) + kEps0, p0_ - 1.0);
  }
  return 0.0;
}

double TransformSpec::envelope(double z) const {
  if (h_ == 0.0) return std::exp(rho_);
  return std::exp(rho_ * std::pow(std::abs(z), h_));
}

std::string TransformSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kExp:
      os << "exp";
      break;
    case Kind::kSmoothedStep:
      os << "smoothed_step(low=" << p0_ << ", high=" << p1_ << ", width=" << p2_ << ")";
      break;
    case Kind::kTemperedExp:
      os << "tempered_exp(h=" << p0_ << ", rho=" << p1_ << ")";
      break;
  }
  os << " [B=" << B_ << ", rho=" << rho_ << ", h=" << h_ << "]";
  return os.str();
}

void TransformSpec::verify() const {
  constexpr int kPoints = 100001;
  for (int i = 0; i < kPoints; ++i) {
    const double z = -50.0 + 100.0 * i / (kPoints - 1);
    const double t = (*this)(z);
    const double env = envelope(z);
    const double slack = 1.0 + 1e-12;
    const bool ok = std::isfinite(t) && t > 0.0 && t <= B_ * env * slack &&
                    t * B_ * env * slack >= 1.0 &&
                    std::abs(derivative(z)) <= B_ * env * slack;
    if (!ok) {
      std::ostringstream os;
      os << "transform " << describe() << " violates its bounds at z = " << z
         << " (T = " << t << ", T' = " << derivative(z) << ", envelope = " << env << ")";
      fail(ErrorCode::kDomain, os.str());
    }
  }
}

Coefficient transform_field(const FieldRealization& fr, const TransformSpec& T) {
  Coefficient c;
  c.values.resize(fr.values.size());
  c.min = kInf;
  c.max = -kInf;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const double z = fr.values[i];
    if (!std::isfinite(z)) {
      fail(ErrorCode::kDomain, "non-finite field value at node " + std::to_string(i));
    }
    c.values[i] = T(z);
    c.min = std::min(c.min, c.values[i]);
    c.max = std::max(c.max, c.values[i]);
  }
  return c;
}

double sup_abs(const std::vector<double>& values, const EvalGrid& grid, const Box& region) {
  require(values.size() == grid.size(), "sup_abs: value count does not match grid");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (region.contains(grid.nodes[i])) s = std::max(s, std::abs(values[i]));
  }
  return s;
}

double sup_abs(const FieldRealization& fr, const Box& region) {
  return sup_abs(fr.values, fr.grid, region);
}

DominationResult domination_check(const FieldSmoother& smoother, const NoiseRealization& z) {
  const auto signed_part = smoother.jump_part(z.atoms, false);
  const auto abs_part = smoother.jump_part(z.atoms, true);
  DominationResult r;
  r.worst_excess = -kInf;
  for (std::size_t i = 0; i < signed_part.size(); ++i) {
    const double excess = std::abs(signed_part[i]) - abs_part[i];
    if (excess > r.worst_excess) {
      r.worst_excess = excess;
      r.worst_node = i;
    }
    r.max_gap = std::max(r.max_gap, -excess);
  }
  if (signed_part.empty()) r.worst_excess = 0.0;
  r.ok = r.worst_excess <= 1e-12 * (1.0 + *std::max_element(abs_part.begin(), abs_part.end()));
  return r;
}

}  // namespace levyfield
