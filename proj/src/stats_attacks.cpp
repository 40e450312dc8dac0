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

#include "af/stats_attacks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "af/common.hpp"
#include "af/fft.hpp"
#include "af/rng.hpp"
#include "af/stft.hpp"

namespace af::attacks {

using audio::AudioClip;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double princarg(double p) { return p - kTwoPi * std::round(p / kTwoPi); }

// Classic phase-vocoder time stretch: analysis hop ha, synthesis hop hs,
// per-bin instantaneous frequency from the wrapped phase increment.
std::vector<double> pv_stretch(const std::vector<double>& x, int sample_rate, size_t ha,
                               size_t hs) {
  audio::StftConfig cfg;
  cfg.hop = static_cast<int>(ha);
  const size_t win = static_cast<size_t>(cfg.window_len);
  const size_t nfft = static_cast<size_t>(cfg.fft_size);
  const size_t bins = nfft / 2 + 1;

  AudioClip tmp;
  tmp.samples = x;
  tmp.sample_rate = sample_rate;
  tmp.id = "pv";
  if (tmp.len() < win) tmp = audio::normalize_length(tmp, win);

  audio::ComplexGrid grid = audio::stft(tmp, cfg);
  std::vector<double> w = audio::hann_window(cfg.window_len);
  audio::Fft fft(nfft);

  std::vector<double> prev_phase(bins, 0.0);
  std::vector<double> synth_phase(bins, 0.0);
  std::vector<audio::cd> frame(bins);

  size_t out_len = (grid.frames - 1) * hs + win;
  std::vector<double> acc(out_len, 0.0), wss(out_len, 0.0);

  for (size_t m = 0; m < grid.frames; ++m) {
    const audio::cd* row = grid.v.data() + m * bins;
    for (size_t k = 0; k < bins; ++k) {
      double mag = std::abs(row[k]);
      double ph = std::arg(row[k]);
      if (m == 0) {
        synth_phase[k] = ph;
      } else {
        double wk = kTwoPi * static_cast<double>(k) / static_cast<double>(nfft);
        double dp = princarg(ph - prev_phase[k] - wk * static_cast<double>(ha));
        double inst = wk + dp / static_cast<double>(ha);
        synth_phase[k] += inst * static_cast<double>(hs);
      }
      prev_phase[k] = ph;
      frame[k] = std::polar(mag, synth_phase[k]);
    }
    std::vector<double> y = fft.irfft(frame);
    size_t off = m * hs;
    for (size_t i = 0; i < win; ++i) {
      acc[off + i] += w[i] * y[i];
      wss[off + i] += w[i] * w[i];
    }
  }
  for (size_t i = 0; i < out_len; ++i) acc[i] = wss[i] > 0.0 ? acc[i] / wss[i] : 0.0;
  return acc;
}

}  // namespace

AudioClip pitch_shift(const AudioClip& c, int semitones) {
  audio::validate(c);
  if (semitones == 0) return c;

  double rate = std::pow(2.0, static_cast<double>(semitones) / 12.0);
  size_t ha = 128;
  size_t hs = static_cast<size_t>(std::llround(static_cast<double>(ha) * rate));
  if (hs == 0) hs = 1;

  std::vector<double> stretched = pv_stretch(c.samples, c.sample_rate, ha, hs);
  // Resampling at exactly 1/rate scales pitch by exactly 2^(n/12); the
  // integer-hop rounding only perturbs duration, which trim/pad absorbs.
  std::vector<double> shifted = audio::resample_by_ratio(stretched, 1.0 / rate);

  AudioClip out;
  out.sample_rate = c.sample_rate;
  out.id = c.id;
  out.samples.assign(c.len(), 0.0);
  std::copy(shifted.begin(),
            shifted.begin() + static_cast<long>(std::min(shifted.size(), c.len())),
            out.samples.begin());
  return out;
}

AudioClip median_filter(const AudioClip& c, int kernel) {
  audio::validate(c);
  if (kernel < 1 || kernel % 2 == 0) {
    throw ParamError("median_filter: kernel must be odd and positive, got " +
                     std::to_string(kernel));
  }
  AudioClip out = c;
  long n = static_cast<long>(c.len());
  long h = kernel / 2;
  std::vector<double> window(static_cast<size_t>(kernel));
  for (long i = 0; i < n; ++i) {
    for (long j = -h; j <= h; ++j) {
      long idx = std::clamp(i + j, 0L, n - 1);
      window[static_cast<size_t>(j + h)] = c.samples[static_cast<size_t>(idx)];
    }
    auto mid = window.begin() + h;
    std::nth_element(window.begin(), mid, window.end());
    out.samples[static_cast<size_t>(i)] = *mid;
  }
  return out;
}

AudioClip noise_add(const AudioClip& c, double sigma, uint64_t seed) {
  audio::validate(c);
  if (sigma < 0.0 || !std::isfinite(sigma)) {
    throw ParamError("noise_add: sigma must be finite and >= 0");
  }
  AudioClip out = c;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (double& s : out.samples) s += sigma * rng.normal();
  return out;
}

AudioClip quantize(const AudioClip& c, int bits) {
  audio::validate(c);
  if (bits < 2 || bits > 16) {
    throw ParamError("quantize: bits must be in [2, 16], got " + std::to_string(bits));
  }
  double g = static_cast<double>((1 << (bits - 1)) - 1);  // levels k/g, k in [-g, g]
  AudioClip out = c;
  for (double& s : out.samples) {
    double x = std::clamp(s, -1.0, 1.0);
    s = std::round(x * g) / g;
  }
  return out;
}

}  // namespace af::attacks
