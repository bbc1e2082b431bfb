// Copyright 2026 The levyfield Authors
// SPDX-License-Identifier: Apache-2.0

// Thin FFTW wrappers. Plan creation is serialized; execution is reentrant.

#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace levyfield {

/// Smallest n' >= n of the form 2^a 3^b 5^c 7^d.
int fft_size_at_least(int n);

/// Unnormalized backward real transform of a Hermitian half spectrum.
void fft_c2r_1d(int n, std::vector<std::complex<double>>& spec,
                std::vector<double>& out);
void fft_c2r_2d(int n0, int n1, std::vector<std::complex<double>>& spec,
                std::vector<double>& out);

/// Real forward/backward transform pair on a fixed 1D or 2D shape.
class RealFft {
 public:
  RealFft(int n0, int n1);  // n1 == 0 for 1D
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t real_size() const { return real_size_; }
  std::size_t spectrum_size() const { return spec_size_; }

  void forward(std::vector<double>& in, std::vector<std::complex<double>>& out) const;
  /// Unnormalized inverse: backward(forward(x)) = real_size() * x.
  void backward(std::vector<std::complex<double>>& in, std::vector<double>& out) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::size_t real_size_;
  std::size_t spec_size_;
};

}  // namespace levyfield
