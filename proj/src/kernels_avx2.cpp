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

// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; nothing here may run unless avx2_available() said yes.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "af/kernels.hpp"

namespace af::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double v_dot(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

double v_sum(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double v_sumsq(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s = std::fma(x[i], x[i], s);
  return s;
}

double v_sqdiff_sum(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    s = std::fma(d, d, s);
  }
  return s;
}

double v_max_abs(const double* x, size_t n) {
  const __m256d msk = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(m, _mm256_andnot_pd(msk, _mm256_loadu_pd(x + i)));
  }
  alignas(32) double tmp[4];
  _mm256_store_pd(tmp, m);
  double r = std::max(std::max(tmp[0], tmp[1]), std::max(tmp[2], tmp[3]));
  for (; i < n; ++i) r = std::max(r, std::fabs(x[i]));
  return r;
}

void v_axpy(double a, const double* x, double* y, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void v_scale(double* x, double a, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  }
  for (; i < n; ++i) x[i] *= a;
}

void v_vadd(const double* a, const double* b, double* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void v_vsub(const double* a, const double* b, double* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void v_vmul(const double* a, const double* b, double* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void v_relu(const double* x, double* out, size_t n) {
  const __m256d z = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(x + i), z));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void v_relu_mask(const double* x, const double* up, double* out, size_t n) {
  const __m256d z = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d m = _mm256_cmp_pd(_mm256_loadu_pd(x + i), z, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(m, _mm256_loadu_pd(up + i)));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? up[i] : 0.0;
}

void v_sign_step(const double* x, const double* g, double e, double* out, size_t n) {
  const __m256d z = _mm256_setzero_pd();
  const __m256d ve = _mm256_set1_pd(e);
  const __m256d vne = _mm256_set1_pd(-e);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d gv = _mm256_loadu_pd(g + i);
    __m256d pos = _mm256_and_pd(_mm256_cmp_pd(gv, z, _CMP_GT_OQ), ve);
    __m256d neg = _mm256_and_pd(_mm256_cmp_pd(gv, z, _CMP_LT_OQ), vne);
    __m256d step = _mm256_or_pd(pos, neg);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), step));
  }
  for (; i < n; ++i) {
    double s = g[i] > 0.0 ? e : (g[i] < 0.0 ? -e : 0.0);
    out[i] = x[i] + s;
  }
}

void v_clamp_box(const double* c, double eps, double* x, size_t n) {
  const __m256d ve = _mm256_set1_pd(eps);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d cv = _mm256_loadu_pd(c + i);
    __m256d lo = _mm256_sub_pd(cv, ve);
    __m256d hi = _mm256_add_pd(cv, ve);
    __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(x + i, _mm256_min_pd(_mm256_max_pd(v, lo), hi));
  }
  for (; i < n; ++i) {
    double lo = c[i] - eps, hi = c[i] + eps;
    x[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
  }
}

void v_clamp_range(double* x, double lo, double hi, size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(x + i), vlo), vhi));
  }
  for (; i < n; ++i) x[i] = x[i] < lo ? lo : (x[i] > hi ? hi : x[i]);
}

const Ops kAvx2 = {
    v_dot,      v_sum,  v_sumsq, v_sqdiff_sum, v_max_abs,   v_axpy,
    v_scale,    v_vadd, v_vsub,  v_vmul,       v_relu,      v_relu_mask,
    v_sign_step, v_clamp_box, v_clamp_range,
};

}  // namespace

const Ops& avx2_ops() { return kAvx2; }

}  // namespace af::kernels
