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

#include "af/stft.hpp"

#include <cmath>

#include "af/common.hpp"
#include "af/kernels.hpp"

namespace af::audio {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

void validate(const StftConfig& cfg, int sample_rate) {
  if (sample_rate <= 0) throw ParamError("stft: sample rate must be positive");
  if (cfg.window_len <= 0 || cfg.hop <= 0 || cfg.fft_size <= 0) {
    throw ParamError("stft: window/hop/fft sizes must be positive");
  }
  if (cfg.fft_size < cfg.window_len) throw ParamError("stft: fft_size < window_len");
  if ((cfg.fft_size & (cfg.fft_size - 1)) != 0) {
    throw ParamError("stft: fft_size must be a power of two");
  }
  if (cfg.hop > cfg.window_len) throw ParamError("stft: hop > window_len");
  if (cfg.mel_bins <= 0) throw ParamError("stft: mel_bins must be positive");
  double fmax = cfg.fmax < 0.0 ? sample_rate / 2.0 : cfg.fmax;
  if (!(cfg.fmin >= 0.0) || !(fmax > cfg.fmin) || fmax > sample_rate / 2.0 + 1e-9) {
    throw ParamError("stft: invalid mel frequency range");
  }
  if (!(cfg.log_floor > 0.0)) throw ParamError("stft: log_floor must be positive");
}

size_t frame_count(size_t len, const StftConfig& cfg) {
  if (len < static_cast<size_t>(cfg.window_len)) {
    throw ShapeError("stft: clip shorter than the analysis window");
  }
  return 1 + (len - static_cast<size_t>(cfg.window_len)) / static_cast<size_t>(cfg.hop);
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)] =
        0.5 - 0.5 * std::cos(kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return w;
}

ComplexGrid stft(const AudioClip& clip, const StftConfig& cfg) {
  validate(clip);
  validate(cfg, clip.sample_rate);
  size_t win = static_cast<size_t>(cfg.window_len);
  size_t hop = static_cast<size_t>(cfg.hop);
  size_t nfft = static_cast<size_t>(cfg.fft_size);
  size_t frames = frame_count(clip.len(), cfg);

  std::vector<double> w = hann_window(cfg.window_len);
  Fft fft(nfft);

  ComplexGrid grid;
  grid.frames = frames;
  grid.bins = nfft / 2 + 1;
  grid.v.resize(frames * grid.bins);

  std::vector<double> frame(nfft, 0.0);
  for (size_t m = 0; m < frames; ++m) {
    size_t off = m * hop;
    kernels::vmul(clip.samples.data() + off, w.data(), frame.data(), win);
    std::fill(frame.begin() + static_cast<long>(win), frame.end(), 0.0);
    std::vector<cd> spec = fft.rfft(frame);
    std::copy(spec.begin(), spec.end(), grid.v.begin() + static_cast<long>(m * grid.bins));
  }
  return grid;
}

AudioClip istft(const ComplexGrid& grid, const StftConfig& cfg, int sample_rate,
                size_t out_len) {
  validate(cfg, sample_rate);
  size_t nfft = static_cast<size_t>(cfg.fft_size);
  if (grid.bins != nfft / 2 + 1) throw ShapeError("istft: grid bins != fft_size/2 + 1");
  if (grid.frames == 0) throw ShapeError("istft: empty grid");
  size_t win = static_cast<size_t>(cfg.window_len);
  size_t hop = static_cast<size_t>(cfg.hop);

  std::vector<double> w = hann_window(cfg.window_len);
  Fft fft(nfft);

  size_t synth_len = (grid.frames - 1) * hop + win;
  std::vector<double> acc(synth_len, 0.0);
  std::vector<double> wss(synth_len, 0.0);

  for (size_t m = 0; m < grid.frames; ++m) {
    std::span<const cd> half(grid.v.data() + m * grid.bins, grid.bins);
    std::vector<double> y = fft.irfft(half);
    size_t off = m * hop;
    for (size_t i = 0; i < win; ++i) {
      acc[off + i] += w[i] * y[i];
      wss[off + i] += w[i] * w[i];
    }
  }
  for (size_t i = 0; i < synth_len; ++i) {
    acc[i] = wss[i] > 0.0 ? acc[i] / wss[i] : 0.0;
  }

  AudioClip out;
  out.sample_rate = sample_rate;
  out.samples.assign(out_len, 0.0);
  std::copy(acc.begin(), acc.begin() + static_cast<long>(std::min(out_len, synth_len)),
            out.samples.begin());
  return out;
}

MelBank mel_filterbank(const StftConfig& cfg, int sample_rate) {
  validate(cfg, sample_rate);
  MelBank bank;
  bank.mel_bins = cfg.mel_bins;
  bank.fft_bins = cfg.fft_size / 2 + 1;
  bank.w.assign(static_cast<size_t>(bank.mel_bins) * bank.fft_bins, 0.0);
  bank.lo.assign(static_cast<size_t>(bank.mel_bins), 0);
  bank.hi.assign(static_cast<size_t>(bank.mel_bins), 0);

  double fmax = cfg.fmax < 0.0 ? sample_rate / 2.0 : cfg.fmax;
  double mel_lo = hz_to_mel(cfg.fmin);
  double mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(static_cast<size_t>(cfg.mel_bins) + 2);
  for (size_t i = 0; i < edges.size(); ++i) {
    double m = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                            static_cast<double>(cfg.mel_bins + 1);
    edges[i] = mel_to_hz(m);
  }

  double bin_hz = static_cast<double>(sample_rate) / cfg.fft_size;
  for (int m = 0; m < cfg.mel_bins; ++m) {
    double fl = edges[static_cast<size_t>(m)];
    double fc = edges[static_cast<size_t>(m) + 1];
    double fr = edges[static_cast<size_t>(m) + 2];
    double row_sum = 0.0;
    int lo = bank.fft_bins, hi = 0;
    for (int k = 0; k < bank.fft_bins; ++k) {
      double f = k * bin_hz;
      double up = (f - fl) / (fc - fl);
      double down = (fr - f) / (fr - fc);
      double val = std::max(0.0, std::min(up, down));
      if (val > 0.0) {
        bank.w[static_cast<size_t>(m) * bank.fft_bins + k] = val;
        row_sum += val;
        lo = std::min(lo, k);
        hi = std::max(hi, k + 1);
      }
    }
    if (row_sum <= 0.0) {
      throw ParamError("mel filterbank row " + std::to_string(m) +
                       " is empty; raise fft_size or lower mel_bins");
    }
    double inv = 1.0 / row_sum;
    for (int k = lo; k < hi; ++k) bank.w[static_cast<size_t>(m) * bank.fft_bins + k] *= inv;
    bank.lo[static_cast<size_t>(m)] = lo;
    bank.hi[static_cast<size_t>(m)] = hi;
  }
  return bank;
}

Spectrogram logmel(const AudioClip& clip, const StftConfig& cfg) {
  ComplexGrid grid = stft(clip, cfg);
  MelBank bank = mel_filterbank(cfg, clip.sample_rate);

  Spectrogram out;
  out.frames = grid.frames;
  out.bins = static_cast<size_t>(cfg.mel_bins);
  out.frame_hop = cfg.hop;
  out.bin_kind = BinKind::mel;
  out.log_scaled = true;
  out.v.resize(out.frames * out.bins);

  std::vector<double> mag(grid.bins);
  for (size_t f = 0; f < grid.frames; ++f) {
    const cd* row = grid.v.data() + f * grid.bins;
    for (size_t k = 0; k < grid.bins; ++k) mag[k] = std::abs(row[k]);
    for (int m = 0; m < cfg.mel_bins; ++m) {
      int lo = bank.lo[static_cast<size_t>(m)], hi = bank.hi[static_cast<size_t>(m)];
      double e = kernels::dot(bank.w.data() + static_cast<size_t>(m) * bank.fft_bins + lo,
                              mag.data() + lo, static_cast<size_t>(hi - lo));
      out.at(f, static_cast<size_t>(m)) = std::log(std::max(e, cfg.log_floor));
    }
  }
  return out;
}

std::vector<double> logmel_input_gradient(const AudioClip& clip, const StftConfig& cfg,
                                          const Spectrogram& upstream) {
  ComplexGrid grid = stft(clip, cfg);
  MelBank bank = mel_filterbank(cfg, clip.sample_rate);
  if (upstream.frames != grid.frames || upstream.bins != static_cast<size_t>(cfg.mel_bins)) {
    throw ShapeError("logmel_input_gradient: upstream grid shape mismatch");
  }

  size_t win = static_cast<size_t>(cfg.window_len);
  size_t hop = static_cast<size_t>(cfg.hop);
  size_t nfft = static_cast<size_t>(cfg.fft_size);
  std::vector<double> w = hann_window(cfg.window_len);
  Fft fft(nfft);

  std::vector<double> grad(clip.len(), 0.0);
  std::vector<double> mag(grid.bins);
  std::vector<double> dmag(grid.bins);
  std::vector<cd> dspec(grid.bins);

  for (size_t f = 0; f < grid.frames; ++f) {
    const cd* row = grid.v.data() + f * grid.bins;
    for (size_t k = 0; k < grid.bins; ++k) mag[k] = std::abs(row[k]);

    // log backward: d log(max(e, floor))/de = 1/e when e > floor, else 0.
    std::fill(dmag.begin(), dmag.end(), 0.0);
    for (int m = 0; m < cfg.mel_bins; ++m) {
      int lo = bank.lo[static_cast<size_t>(m)], hi = bank.hi[static_cast<size_t>(m)];
      const double* wrow = bank.w.data() + static_cast<size_t>(m) * bank.fft_bins;
      double e = kernels::dot(wrow + lo, mag.data() + lo, static_cast<size_t>(hi - lo));
      if (e <= cfg.log_floor) continue;
      double dmel = upstream.at(f, static_cast<size_t>(m)) / e;
      kernels::axpy(dmel, wrow + lo, dmag.data() + lo, static_cast<size_t>(hi - lo));
    }

    // |z| backward: d|z|/dz = z/|z| componentwise on (Re, Im); 0 at z = 0.
    for (size_t k = 0; k < grid.bins; ++k) {
      if (mag[k] > 0.0) {
        double s = dmag[k] / mag[k];
        dspec[k] = cd(row[k].real() * s, row[k].imag() * s);
      } else {
        dspec[k] = cd(0.0, 0.0);
      }
    }

    std::vector<double> dframe = fft.rfft_adjoint(dspec);
    size_t off = f * hop;
    for (size_t i = 0; i < win; ++i) grad[off + i] += w[i] * dframe[i];
  }
  return grad;
}

}  // namespace af::audio
