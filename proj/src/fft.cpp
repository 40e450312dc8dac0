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

#include "af/fft.hpp"

#include <cmath>

#include "af/common.hpp"

namespace af::audio {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(size_t n) { return n >= 2 && (n & (n - 1)) == 0; }
}  // namespace

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(size_t n) : n_(n) {
  if (!is_pow2(n)) throw ShapeError("fft size must be a power of two >= 2");
  rev_.resize(n);
  size_t bits = 0;
  while ((size_t{1} << bits) < n) ++bits;
  for (size_t i = 0; i < n; ++i) {
    size_t r = 0;
    for (size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1) << (bits - 1 - b);
    rev_[i] = r;
  }
  // Twiddles for each stage, laid out stage by stage: a stage of half-length m
  // uses entries exp(-i*pi*j/m) for j in [0, m).
  tw_.reserve(n - 1);
  for (size_t len = 2; len <= n; len <<= 1) {
    size_t m = len / 2;
    for (size_t j = 0; j < m; ++j) {
      double ang = -kTwoPi * static_cast<double>(j) / static_cast<double>(len);
      tw_.push_back(cd(std::cos(ang), std::sin(ang)));
    }
  }
  tw_inv_.resize(tw_.size());
  for (size_t i = 0; i < tw_.size(); ++i) tw_inv_[i] = std::conj(tw_[i]);
}

void Fft::run(cd* a, bool inv) const {
  const std::vector<cd>& tw = inv ? tw_inv_ : tw_;
  for (size_t i = 0; i < n_; ++i) {
    size_t r = rev_[i];
    if (i < r) std::swap(a[i], a[r]);
  }
  size_t toff = 0;
  for (size_t len = 2; len <= n_; len <<= 1) {
    size_t m = len / 2;
    for (size_t i = 0; i < n_; i += len) {
      for (size_t j = 0; j < m; ++j) {
        cd u = a[i + j];
        cd v = a[i + j + m] * tw[toff + j];
        a[i + j] = u + v;
        a[i + j + m] = u - v;
      }
    }
    toff += m;
  }
}

void Fft::forward(cd* data) const { run(data, false); }

void Fft::inverse(cd* data) const {
  run(data, true);
  double inv_n = 1.0 / static_cast<double>(n_);
  for (size_t i = 0; i < n_; ++i) data[i] *= inv_n;
}

std::vector<cd> Fft::rfft(std::span<const double> x) const {
  if (x.size() != n_) throw ShapeError("rfft: input length != fft size");
  std::vector<cd> buf(n_);
  for (size_t i = 0; i < n_; ++i) buf[i] = cd(x[i], 0.0);
  forward(buf.data());
  buf.resize(n_ / 2 + 1);
  return buf;
}

std::vector<double> Fft::irfft(std::span<const cd> half) const {
  if (half.size() != n_ / 2 + 1) throw ShapeError("irfft: bad bin count");
  std::vector<cd> buf(n_);
  for (size_t k = 0; k <= n_ / 2; ++k) buf[k] = half[k];
  for (size_t k = 1; k < n_ / 2; ++k) buf[n_ - k] = std::conj(half[k]);
  inverse(buf.data());
  std::vector<double> out(n_);
  for (size_t i = 0; i < n_; ++i) out[i] = buf[i].real();
  return out;
}

std::vector<double> Fft::rfft_adjoint(std::span<const cd> grad_half) const {
  if (grad_half.size() != n_ / 2 + 1) throw ShapeError("rfft_adjoint: bad bin count");
  // dJ/dx_n = Re(sum_k conj(g_k) * exp(-2*pi*i*k*n/N)) for k = 0..N/2, which is
  // a forward transform of the conjugated gradient zero-padded above N/2.
  std::vector<cd> buf(n_, cd(0.0, 0.0));
  for (size_t k = 0; k <= n_ / 2; ++k) buf[k] = std::conj(grad_half[k]);
  forward(buf.data());
  std::vector<double> out(n_);
  for (size_t i = 0; i < n_; ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace af::audio
