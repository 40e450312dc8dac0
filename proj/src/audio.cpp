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

#include "af/audio.hpp"

#include <cmath>

#include "af/common.hpp"

namespace af::audio {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr int kHalfTaps = 32;   // 64-tap filter
constexpr double kKaiserBeta = 8.6;

double bessel_i0(double x) {
  // Series expansion; converges fast for |x| <= beta.
  double sum = 1.0, term = 1.0;
  double hx = x * 0.5;
  for (int k = 1; k < 64; ++k) {
    term *= hx / static_cast<double>(k);
    double add = term * term;
    sum += add;
    if (add < sum * 1e-17) break;
  }
  return sum;
}

double kaiser(double frac) {  // frac in [-1, 1]
  double t = 1.0 - frac * frac;
  if (t < 0.0) return 0.0;
  static const double inv_i0b = 1.0 / bessel_i0(kKaiserBeta);
  return bessel_i0(kKaiserBeta * std::sqrt(t)) * inv_i0b;
}

double sinc(double u) {
  if (u == 0.0) return 1.0;
  double a = kPi * u;
  return std::sin(a) / a;
}

}  // namespace

AudioClip normalize_length(const AudioClip& c, size_t target_len) {
  validate(c);
  if (target_len == 0) throw ParamError("normalize_length: target length must be > 0");
  AudioClip out;
  out.sample_rate = c.sample_rate;
  out.id = c.id;
  out.samples.resize(target_len);
  size_t n = c.len();
  if (n >= target_len) {
    std::copy(c.samples.begin(), c.samples.begin() + static_cast<long>(target_len),
              out.samples.begin());
  } else {
    for (size_t i = 0; i < target_len; ++i) out.samples[i] = c.samples[i % n];
  }
  return out;
}

std::vector<double> resample_by_ratio(std::span<const double> x, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw ParamError("resample: ratio must be positive and finite");
  }
  size_t in_len = x.size();
  size_t out_len = static_cast<size_t>(std::llround(static_cast<double>(in_len) * ratio));
  std::vector<double> out(out_len, 0.0);
  double fc = std::min(1.0, ratio);
  for (size_t i = 0; i < out_len; ++i) {
    double t = static_cast<double>(i) / ratio;
    long j0 = static_cast<long>(std::floor(t)) - (kHalfTaps - 1);
    double acc = 0.0, gain = 0.0;
    for (long j = j0; j < j0 + 2 * kHalfTaps; ++j) {
      double u = t - static_cast<double>(j);
      double h = fc * sinc(fc * u) * kaiser(u / kHalfTaps);
      gain += h;
      if (j >= 0 && j < static_cast<long>(in_len)) acc += x[static_cast<size_t>(j)] * h;
    }
    out[i] = gain != 0.0 ? acc / gain : 0.0;
  }
  return out;
}

AudioClip resample(const AudioClip& c, int new_rate) {
  validate(c);
  if (new_rate <= 0) throw ParamError("resample: target rate must be positive");
  AudioClip out;
  out.sample_rate = new_rate;
  out.id = c.id;
  if (new_rate == c.sample_rate) {
    out.samples = c.samples;
    return out;
  }
  double ratio = static_cast<double>(new_rate) / static_cast<double>(c.sample_rate);
  out.samples = resample_by_ratio(c.samples, ratio);
  return out;
}

}  // namespace af::audio
