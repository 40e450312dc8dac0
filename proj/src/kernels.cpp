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

#include "af/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace af::kernels {

namespace {

double s_dot(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

double s_sum(const double* x, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double s_sumsq(const double* x, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc = std::fma(x[i], x[i], acc);
  return acc;
}

double s_sqdiff_sum(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc = std::fma(d, d, acc);
  }
  return acc;
}

double s_max_abs(const double* x, size_t n) {
  double m = 0.0;
  for (size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void s_axpy(double a, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void s_scale(double* x, double a, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= a;
}

void s_vadd(const double* a, const double* b, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void s_vsub(const double* a, const double* b, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void s_vmul(const double* a, const double* b, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void s_relu(const double* x, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void s_relu_mask(const double* x, const double* up, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? up[i] : 0.0;
}

void s_sign_step(const double* x, const double* g, double e, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    double s = g[i] > 0.0 ? e : (g[i] < 0.0 ? -e : 0.0);
    out[i] = x[i] + s;
  }
}

void s_clamp_box(const double* c, double eps, double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    double lo = c[i] - eps, hi = c[i] + eps;
    x[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
  }
}

void s_clamp_range(double* x, double lo, double hi, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
}

const Ops kScalar = {
    s_dot,      s_sum,  s_sumsq, s_sqdiff_sum, s_max_abs,   s_axpy,
    s_scale,    s_vadd, s_vsub,  s_vmul,       s_relu,      s_relu_mask,
    s_sign_step, s_clamp_box, s_clamp_range,
};

struct Active {
  const Ops* ops;
  const char* name;
};

Active pick_default() {
#if defined(AF_HAVE_AVX2_TU)
  const char* env = std::getenv("AF_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return {&kScalar, "scalar"};
  if (avx2_available()) return {&avx2_ops(), "avx2"};
#endif
  return {&kScalar, "scalar"};
}

Active& active() {
  static Active a = pick_default();
  return a;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

bool avx2_available() {
#if defined(AF_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& ops() { return *active().ops; }

const char* active_backend() { return active().name; }

bool set_backend(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    active() = {&kScalar, "scalar"};
    return true;
  }
#if defined(AF_HAVE_AVX2_TU)
  if (std::strcmp(name, "avx2") == 0 && avx2_available()) {
    active() = {&avx2_ops(), "avx2"};
    return true;
  }
#endif
  return false;
}

}  // namespace af::kernels
