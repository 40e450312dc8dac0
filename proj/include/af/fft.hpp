// Copyright (c) 2026 afbench authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace af::audio {

using cd = std::complex<double>;

// Iterative radix-2 FFT with precomputed twiddles and bit-reversal table.
// Forward kernel is exp(-2*pi*i*k*n/N); inverse includes the 1/N factor.
class Fft {
 public:
  explicit Fft(size_t n);  // n must be a power of two >= 2

  size_t size() const { return n_; }
  void forward(cd* data) const;
  void inverse(cd* data) const;

  // Real input -> bins 0..n/2 (inclusive).
  std::vector<cd> rfft(std::span<const double> x) const;
  // Hermitian-symmetric inverse of rfft; returns n real samples.
  std::vector<double> irfft(std::span<const cd> half) const;
  // Adjoint of rfft for real-valued objectives: given dJ/d(Re X_k), dJ/d(Im X_k)
  // packed as complex values for k = 0..n/2, returns dJ/dx_n.
  std::vector<double> rfft_adjoint(std::span<const cd> grad_half) const;

 private:
  void run(cd* data, bool inv) const;

  size_t n_;
  std::vector<size_t> rev_;
  std::vector<cd> tw_;      // forward twiddles, per stage
  std::vector<cd> tw_inv_;  // conjugates
};

size_t next_pow2(size_t n);

}  // namespace af::audio
