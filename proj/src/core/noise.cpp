// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "levyfield/noise.hpp"

#include <algorithm>
#include <bit>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "levyfield/error.hpp"
#include "parallel.hpp"

namespace levyfield {

Box Box::interval(double a, double b) {
  Box box;
  box.d = 1;
  box.lower = {a, 0.0};
  box.upper = {b, 0.0};
  box.validate();
  return box;
}

Box Box::rectangle(double x0, double x1, double y0, double y1) {
  Box box;
  box.d = 2;
  box.lower = {x0, y0};
  box.upper = {x1, y1};
  box.validate();
  return box;
}

void Box::validate() const {
  require(d == 1 || d == 2, "box dimension must be 1 or 2");
  for (int a = 0; a < d; ++a) {
    require(std::isfinite(lower[a]) && std::isfinite(upper[a]) && upper[a] > lower[a],
            "box upper corner must exceed lower corner on every axis");
  }
}

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < d; ++a) v *= width(a);
  return v;
}

bool Box::contains(const std::array<double, 2>& x) const {
  for (int a = 0; a < d; ++a) {
    if (x[a] < lower[a] || x[a] > upper[a]) return false;
  }
  return true;
}

bool Box::contains(const Box& inner) const {
  if (inner.d != d) return false;
  for (int a = 0; a < d; ++a) {
    if (inner.lower[a] < lower[a] || inner.upper[a] > upper[a]) return false;
  }
  return true;
}

Box Box::padded(double pad) const {
  Box b = *this;
  for (int a = 0; a < d; ++a) {
    b.lower[a] -= pad;
    b.upper[a] += pad;
  }
  b.validate();
  return b;
}

double Box::distance_to_complement(const Box& outer) const {
  require(outer.contains(*this), "distance_to_complement: box not contained");
  double dist = std::numeric_limits<double>::infinity();
  for (int a = 0; a < d; ++a) {
    dist = std::min({dist, lower[a] - outer.lower[a], outer.upper[a] - upper[a]});
  }
  return dist;
}

bool operator==(const Box& a, const Box& b) {
  return a.d == b.d && a.lower == b.lower && a.upper == b.upper;
}

CellGrid CellGrid::with_spacing(const Box& box, double h) {
  require(h > 0.0, "cell spacing must be positive");
  CellGrid g;
  g.box = box;
  for (int a = 0; a < box.d; ++a) {
    g.cells[a] = std::max(1, static_cast<int>(std::lround(box.width(a) / h)));
  }
  if (box.d == 1) g.cells[1] = 1;
  g.validate();
  return g;
}

void CellGrid::validate() const {
  box.validate();
  require(cells[0] >= 1 && (box.d == 1 || cells[1] >= 1),
          "grid resolution must be at least one cell per axis");
}

std::size_t CellGrid::size() const {
  return box.d == 1 ? static_cast<std::size_t>(cells[0])
                    : static_cast<std::size_t>(cells[0]) * cells[1];
}

double CellGrid::cell_volume() const {
  double v = spacing(0);
  if (box.d == 2) v *= spacing(1);
  return v;
}

std::array<int, 2> CellGrid::multi_index(std::size_t index) const {
  if (box.d == 1) return {static_cast<int>(index), 0};
  return {static_cast<int>(index / cells[1]), static_cast<int>(index % cells[1])};
}

std::size_t CellGrid::flat_index(int i0, int i1) const {
  return box.d == 1 ? static_cast<std::size_t>(i0)
                    : static_cast<std::size_t>(i0) * cells[1] + i1;
}

std::array<double, 2> CellGrid::center(std::size_t index) const {
  const auto mi = multi_index(index);
  std::array<double, 2> c{0.0, 0.0};
  for (int a = 0; a < box.d; ++a) c[a] = box.lower[a] + (mi[a] + 0.5) * spacing(a);
  return c;
}

std::vector<double> CellGrid::sample(
    const std::function<double(double, double)>& f) const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto c = center(j);
    out[j] = f(c[0], c[1]);
  }
  return out;
}

std::vector<double> CellGrid::indicator(const Box& region) const {
  require(region.d == box.d, "indicator region dimension mismatch");
  std::vector<double> out(size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = region.contains(center(j)) ? 1.0 : 0.0;
  }
  return out;
}

double CellGrid::interpolate(const std::vector<double>& values,
                             const std::array<double, 2>& x) const {
  require(values.size() == size(), "interpolate: value count does not match grid");
  std::array<int, 2> i0{0, 0};
  std::array<double, 2> t{0.0, 0.0};
  for (int a = 0; a < box.d; ++a) {
    const double u = (x[a] - box.lower[a]) / spacing(a) - 0.5;
    if (cells[a] == 1 || u <= 0.0) {
      i0[a] = 0;
      t[a] = 0.0;
    } else if (u >= cells[a] - 1) {
      i0[a] = cells[a] - 2;
      t[a] = 1.0;
    } else {
      i0[a] = static_cast<int>(std::floor(u));
      t[a] = u - i0[a];
    }
  }
  if (box.d == 1) {
    const double v0 = values[i0[0]];
    if (t[0] == 0.0) return v0;
    return v0 + t[0] * (values[i0[0] + 1] - v0);
  }
  auto at = [&](int a, int b) {
    const int ia = std::min(i0[0] + a, cells[0] - 1);
    const int ib = std::min(i0[1] + b, cells[1] - 1);
    return values[flat_index(ia, ib)];
  };
  const double w00 = (1 - t[0]) * (1 - t[1]), w10 = t[0] * (1 - t[1]);
  const double w01 = (1 - t[0]) * t[1], w11 = t[0] * t[1];
  double v = w00 * at(0, 0);
  if (w10 != 0.0) v += w10 * at(1, 0);
  if (w01 != 0.0) v += w01 * at(0, 1);
  if (w11 != 0.0) v += w11 * at(1, 1);
  return v;
}

bool operator==(const CellGrid& a, const CellGrid& b) {
  return a.box == b.box && a.cells == b.cells;
}

double effective_drift(const LevyTriplet& triplet) {
  return triplet.drift - compensator_drift(triplet.nu);
}

NoiseSampler::NoiseSampler(const LevyTriplet& triplet, const CellGrid& grid,
                           const NoiseOptions& opts)
    : triplet_(triplet), grid_(grid) {
  triplet.validate();
  grid.validate();
  if (!triplet.nu.is_null()) {
    shells_ = shell_partition(triplet.nu, opts.drift_tolerance, opts.shells);
  }
  drift_ = effective_drift(triplet) + shells_.absorbed_drift();
}

NoiseRealization NoiseSampler::sample(std::uint64_t seed) const {
  NoiseRealization z;
  z.grid = grid_;
  z.seed = seed;
  z.drift = drift_;
  const std::size_t n = grid_.size();
  z.gaussian_cells.assign(n, 0.0);
  if (triplet_.sigma2 > 0.0) {
    const double sd = std::sqrt(triplet_.sigma2 * grid_.cell_volume());
    boost::random::normal_distribution<double> normal(0.0, sd);
    for (std::size_t j = 0; j < n; ++j) {
      Stream rng(seed, StreamTag::kGaussianCells, j);
      z.gaussian_cells[j] = normal(rng);
    }
  }
  if (shells_.sampler && shells_.total_mass > 0.0) {
    Stream count_rng(seed, StreamTag::kPoissonCount, 0);
    boost::random::poisson_distribution<long, double> poisson(expected_atoms());
    const long count = poisson(count_rng);
    z.atoms.resize(static_cast<std::size_t>(count));
    const Box& box = grid_.box;
    for (long j = 0; j < count; ++j) {
      Stream rng(seed, StreamTag::kAtoms, static_cast<std::uint64_t>(j));
      Atom& a = z.atoms[static_cast<std::size_t>(j)];
      for (int ax = 0; ax < box.d; ++ax) {
        a.x[ax] = box.lower[ax] + rng.uniform() * box.width(ax);
      }
      a.s = shells_.sampler->sample(rng);
    }
  }
  return z;
}

NoiseRealization sample_noise(const LevyTriplet& triplet, const CellGrid& grid,
                              std::uint64_t seed, const NoiseOptions& opts) {
  return NoiseSampler(triplet, grid, opts).sample(seed);
}

double apply_functional(const NoiseRealization& z, const std::vector<double>& f) {
  require(f.size() == z.grid.size() && z.gaussian_cells.size() == f.size(),
          "apply_functional: function is not sampled on the realization grid");
  const double vol = z.grid.cell_volume();
  double mean_part = 0.0;
  double gauss_part = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    mean_part += f[j];
    gauss_part += z.gaussian_cells[j] * f[j];
  }
  double jump_part = 0.0;
  for (const auto& a : z.atoms) jump_part += a.s * z.grid.interpolate(f, a.x);
  return z.drift * mean_part * vol + gauss_part + jump_part;
}

std::complex<double> reference_char_functional(const LevyTriplet& triplet,
                                               const CellGrid& grid,
                                               const std::vector<double>& f,
                                               double t) {
  require(f.size() == grid.size(), "reference_char_functional: grid mismatch");
  if (t == 0.0) return {1.0, 0.0};
  // psi is evaluated once per distinct cell value.
  std::vector<double> sorted(f);
  std::sort(sorted.begin(), sorted.end());
  std::complex<double> acc{0.0, 0.0};
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (sorted[i] != 0.0) {
      acc += static_cast<double>(j - i) * levy_characteristic(triplet, t * sorted[i]);
    }
    i = j;
  }
  return std::exp(acc * grid.cell_volume());
}

std::vector<CharFunctionalEstimate> empirical_char_functional(
    const LevyTriplet& triplet, const CellGrid& grid, const std::vector<double>& f,
    const std::vector<double>& ts, std::size_t n_samples, std::uint64_t seed,
    const NoiseOptions& opts, int workers) {
  require(n_samples >= 1, "empirical_char_functional needs n_samples >= 1");
  NoiseSampler sampler(triplet, grid, opts);
  std::vector<double> values(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    values[i] = apply_functional(sampler.sample(derive_seed(seed, i)), f);
  });
  std::vector<CharFunctionalEstimate> out;
  out.reserve(ts.size());
  for (double t : ts) {
    CharFunctionalEstimate e;
    e.t = t;
    if (t == 0.0) {
      e.empirical = {1.0, 0.0};
    } else {
      double re = 0.0, im = 0.0;
      for (double v : values) {
        re += std::cos(t * v);
        im += std::sin(t * v);
      }
      e.empirical = {re / n_samples, im / n_samples};
    }
    e.reference = reference_char_functional(triplet, grid, f, t);
    out.push_back(e);
  }
  return out;
}

NoiseRealization restrict_noise(const NoiseRealization& z, const Box& sub) {
  const CellGrid& g = z.grid;
  require(g.box.contains(sub), "restrict_noise: sub-box outside the noise box");
  std::array<int, 2> first{0, 0};
  std::array<int, 2> count{1, 1};
  for (int a = 0; a < g.box.d; ++a) {
    const double u0 = (sub.lower[a] - g.box.lower[a]) / g.spacing(a);
    const double u1 = (sub.upper[a] - g.box.lower[a]) / g.spacing(a);
    const double r0 = std::round(u0), r1 = std::round(u1);
    require(std::abs(u0 - r0) < 1e-9 && std::abs(u1 - r1) < 1e-9,
            "restrict_noise: sub-box must be a union of whole cells");
    first[a] = static_cast<int>(r0);
    count[a] = static_cast<int>(r1) - first[a];
  }
  NoiseRealization out;
  out.grid.box = g.box;
  for (int a = 0; a < g.box.d; ++a) {
    out.grid.box.lower[a] = g.box.lower[a] + first[a] * g.spacing(a);
    out.grid.box.upper[a] = g.box.lower[a] + (first[a] + count[a]) * g.spacing(a);
  }
  out.grid.cells = count;
  out.drift = z.drift;
  out.seed = z.seed;
  out.gaussian_cells.resize(out.grid.size());
  for (std::size_t j = 0; j < out.gaussian_cells.size(); ++j) {
    const auto mi = out.grid.multi_index(j);
    out.gaussian_cells[j] =
        z.gaussian_cells[g.flat_index(mi[0] + first[0], mi[1] + first[1])];
  }
  for (const auto& a : z.atoms) {
    bool inside = true;
    for (int ax = 0; ax < g.box.d; ++ax) {
      // half-open cells keep every atom in exactly one restriction
      inside = inside && a.x[ax] >= out.grid.box.lower[ax] &&
               (a.x[ax] < out.grid.box.upper[ax] ||
                (a.x[ax] == g.box.upper[ax] && out.grid.box.upper[ax] == g.box.upper[ax]));
    }
    if (inside) out.atoms.push_back(a);
  }
  return out;
}

NoiseRealization merge_noise(const NoiseRealization& a, const NoiseRealization& b) {
  require(a.grid == b.grid, "merge_noise: realizations live on different grids");
  NoiseRealization out = a;
  for (std::size_t j = 0; j < out.gaussian_cells.size(); ++j) {
    out.gaussian_cells[j] += b.gaussian_cells[j];
  }
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  out.drift += b.drift;
  return out;
}

namespace {

constexpr char kMagic[4] = {'L', 'F', 'N', 'Z'};
constexpr std::uint32_t kSnapshotVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    fail(ErrorCode::kIo, "truncated noise snapshot: " + path);
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

}  // namespace

void save_noise(const NoiseRealization& z, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorCode::kIo, "cannot open for writing: " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(z.grid.box.d));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(z.grid.cells[0]));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(z.grid.cells[1]));
  for (int a = 0; a < 2; ++a) put<double>(os, z.grid.box.lower[a]);
  for (int a = 0; a < 2; ++a) put<double>(os, z.grid.box.upper[a]);
  put<double>(os, z.drift);
  put<std::uint64_t>(os, z.seed);
  put<std::uint64_t>(os, z.gaussian_cells.size());
  for (double w : z.gaussian_cells) put<double>(os, w);
  put<std::uint64_t>(os, z.atoms.size());
  for (const auto& a : z.atoms) {
    put<double>(os, a.x[0]);
    put<double>(os, a.x[1]);
    put<double>(os, a.s);
  }
  if (!os) fail(ErrorCode::kIo, "write failed: " + path);
}

NoiseRealization load_noise(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::kIo, "cannot open noise snapshot: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    fail(ErrorCode::kIo, "not a noise snapshot (bad magic): " + path);
  }
  const auto version = get<std::uint32_t>(is, path);
  if (version != kSnapshotVersion) {
    fail(ErrorCode::kIo, "unsupported noise snapshot version " + std::to_string(version));
  }
  NoiseRealization z;
  z.grid.box.d = static_cast<int>(get<std::uint32_t>(is, path));
  z.grid.cells[0] = static_cast<int>(get<std::uint32_t>(is, path));
  z.grid.cells[1] = static_cast<int>(get<std::uint32_t>(is, path));
  for (int a = 0; a < 2; ++a) z.grid.box.lower[a] = get<double>(is, path);
  for (int a = 0; a < 2; ++a) z.grid.box.upper[a] = get<double>(is, path);
  z.grid.validate();
  z.drift = get<double>(is, path);
  z.seed = get<std::uint64_t>(is, path);
  const auto n = get<std::uint64_t>(is, path);
  if (n != z.grid.size()) fail(ErrorCode::kIo, "noise snapshot cell count mismatch");
  z.gaussian_cells.resize(n);
  for (auto& w : z.gaussian_cells) w = get<double>(is, path);
  const auto m = get<std::uint64_t>(is, path);
  z.atoms.resize(m);
  for (auto& a : z.atoms) {
    a.x[0] = get<double>(is, path);
    a.x[1] = get<double>(is, path);
    a.s = get<double>(is, path);
  }
  return z;
}

}  // namespace levyfield
