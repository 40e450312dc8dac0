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

#include <cstddef>

// Double-precision vector primitives used by the conv layers, attacks and
// metrics. Two implementations exist: a scalar reference and an AVX2 variant;
// the active one is picked at load time from CPUID (overridable via the
// AF_KERNELS environment variable or set_backend, which the equivalence tests
// use). Reduction results may differ between backends at rounding level
// because the AVX2 path keeps four accumulators; elementwise ops are
// bit-identical.

namespace af::kernels {

struct Ops {
  double (*dot)(const double* a, const double* b, size_t n);
  double (*sum)(const double* x, size_t n);
  double (*sumsq)(const double* x, size_t n);
  double (*sqdiff_sum)(const double* a, const double* b, size_t n);
  double (*max_abs)(const double* x, size_t n);
  void (*axpy)(double a, const double* x, double* y, size_t n);
  void (*scale)(double* x, double a, size_t n);
  void (*vadd)(const double* a, const double* b, double* out, size_t n);
  void (*vsub)(const double* a, const double* b, double* out, size_t n);
  void (*vmul)(const double* a, const double* b, double* out, size_t n);
  void (*relu)(const double* x, double* out, size_t n);
  // out = up where x > 0, else 0.
  void (*relu_mask)(const double* x, const double* up, double* out, size_t n);
  // out = x + e * sign(g), sign(0) = 0.
  void (*sign_step)(const double* x, const double* g, double e, double* out, size_t n);
  // x = clamp(x, c - eps, c + eps) elementwise around center c.
  void (*clamp_box)(const double* c, double eps, double* x, size_t n);
  void (*clamp_range)(double* x, double lo, double hi, size_t n);
};

const Ops& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif

// Active backend table.
const Ops& ops();
const char* active_backend();                  // "scalar" or "avx2"
bool set_backend(const char* name);            // false if unavailable
bool avx2_available();

inline double dot(const double* a, const double* b, size_t n) { return ops().dot(a, b, n); }
inline double sum(const double* x, size_t n) { return ops().sum(x, n); }
inline double sumsq(const double* x, size_t n) { return ops().sumsq(x, n); }
inline double sqdiff_sum(const double* a, const double* b, size_t n) {
  return ops().sqdiff_sum(a, b, n);
}
inline double max_abs(const double* x, size_t n) { return ops().max_abs(x, n); }
inline void axpy(double a, const double* x, double* y, size_t n) { ops().axpy(a, x, y, n); }
inline void scale(double* x, double a, size_t n) { ops().scale(x, a, n); }
inline void vadd(const double* a, const double* b, double* out, size_t n) {
  ops().vadd(a, b, out, n);
}
inline void vsub(const double* a, const double* b, double* out, size_t n) {
  ops().vsub(a, b, out, n);
}
inline void vmul(const double* a, const double* b, double* out, size_t n) {
  ops().vmul(a, b, out, n);
}
inline void relu(const double* x, double* out, size_t n) { ops().relu(x, out, n); }
inline void relu_mask(const double* x, const double* up, double* out, size_t n) {
  ops().relu_mask(x, up, out, n);
}
inline void sign_step(const double* x, const double* g, double e, double* out, size_t n) {
  ops().sign_step(x, g, e, out, n);
}
inline void clamp_box(const double* c, double eps, double* x, size_t n) {
  ops().clamp_box(c, eps, x, n);
}
inline void clamp_range(double* x, double lo, double hi, size_t n) {
  ops().clamp_range(x, lo, hi, n);
}

}  // namespace af::kernels
