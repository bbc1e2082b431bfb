// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "levyfield/error.hpp"

namespace levyfield {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace

int fft_size_at_least(int n) {
  require(n >= 1, "fft size must be positive");
  for (int c = n;; ++c) {
    int r = c;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return c;
  }
}

void fft_c2r_1d(int n, std::vector<std::complex<double>>& spec,
                std::vector<double>& out) {
  RealFft f(n, 0);
  f.backward(spec, out);
}

void fft_c2r_2d(int n0, int n1, std::vector<std::complex<double>>& spec,
                std::vector<double>& out) {
  RealFft f(n0, n1);
  f.backward(spec, out);
}

struct RealFft::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

RealFft::RealFft(int n0, int n1) : plans_(std::make_unique<Plans>()) {
  require(n0 >= 1 && n1 >= 0, "invalid FFT shape");
  real_size_ = n1 == 0 ? static_cast<std::size_t>(n0)
                       : static_cast<std::size_t>(n0) * n1;
  spec_size_ = n1 == 0 ? static_cast<std::size_t>(n0 / 2 + 1)
                       : static_cast<std::size_t>(n0) * (n1 / 2 + 1);
  std::vector<double> r(real_size_);
  std::vector<std::complex<double>> c(spec_size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (n1 == 0) {
    plans_->fwd = fftw_plan_dft_r2c_1d(n0, r.data(), as_fftw(c.data()), FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_c2r_1d(n0, as_fftw(c.data()), r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  } else {
    plans_->fwd =
        fftw_plan_dft_r2c_2d(n0, n1, r.data(), as_fftw(c.data()), FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd =
        fftw_plan_dft_c2r_2d(n0, n1, as_fftw(c.data()), r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  require(plans_->fwd && plans_->bwd, "FFTW plan creation failed",
          ErrorCode::kInternal);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

void RealFft::forward(std::vector<double>& in,
                      std::vector<std::complex<double>>& out) const {
  require(in.size() == real_size_, "FFT input size mismatch", ErrorCode::kInternal);
  out.resize(spec_size_);
  // New-array execution; alignment may differ from the planning arrays.
  fftw_execute_dft_r2c(plans_->fwd, in.data(), as_fftw(out.data()));
}

void RealFft::backward(std::vector<std::complex<double>>& in,
                       std::vector<double>& out) const {
  require(in.size() == spec_size_, "FFT input size mismatch", ErrorCode::kInternal);
  out.resize(real_size_);
  // c2r destroys its input.
  fftw_execute_dft_c2r(plans_->bwd, as_fftw(in.data()), out.data());
}

}  // namespace levyfield
