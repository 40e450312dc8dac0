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

#include "af/audio.hpp"
#include "af/fft.hpp"

namespace af::audio {

struct StftConfig {
  int window_len = 512;
  int hop = 128;
  int fft_size = 512;
  int mel_bins = 64;
  double fmin = 0.0;
  double fmax = -1.0;  // -1 resolves to sample_rate / 2
  double log_floor = 1e-10;
};

void validate(const StftConfig& cfg, int sample_rate);

// Frame count for analysis without centering; requires len >= window_len.
size_t frame_count(size_t len, const StftConfig& cfg);

// Hann window evaluated at half-sample offsets: strictly positive, so the
// squared-window overlap-add normalization in istft covers edge samples.
std::vector<double> hann_window(int n);

struct ComplexGrid {
  size_t frames = 0;
  size_t bins = 0;  // fft_size / 2 + 1
  std::vector<cd> v;

  cd& at(size_t f, size_t b) { return v[f * bins + b]; }
  const cd& at(size_t f, size_t b) const { return v[f * bins + b]; }
};

enum class BinKind { linear, mel };

struct Spectrogram {
  size_t frames = 0;
  size_t bins = 0;
  std::vector<double> v;
  int frame_hop = 0;
  BinKind bin_kind = BinKind::linear;
  bool log_scaled = false;

  double& at(size_t f, size_t b) { return v[f * bins + b]; }
  double at(size_t f, size_t b) const { return v[f * bins + b]; }
};

ComplexGrid stft(const AudioClip& clip, const StftConfig& cfg);

// Overlap-add with window-squared normalization; output trimmed or
// zero-padded to out_len.
AudioClip istft(const ComplexGrid& grid, const StftConfig& cfg, int sample_rate,
                size_t out_len);

// Triangular mel filterbank on FFT bin centers; every row is normalized to
// sum to 1. Shape [mel_bins x (fft_size/2 + 1)], row-major.
struct MelBank {
  int mel_bins = 0;
  int fft_bins = 0;
  std::vector<double> w;        // dense weights
  std::vector<int> lo, hi;      // nonzero column range [lo, hi) per row
};
MelBank mel_filterbank(const StftConfig& cfg, int sample_rate);

// values[f][m] = log(max((mel |STFT|)[f][m], log_floor))
Spectrogram logmel(const AudioClip& clip, const StftConfig& cfg);

// Pull the gradient of a scalar objective back from a log-mel grid to the
// waveform: log -> filterbank transpose -> |z| -> DFT adjoint -> window/OLA.
std::vector<double> logmel_input_gradient(const AudioClip& clip, const StftConfig& cfg,
                                          const Spectrogram& upstream);

}  // namespace af::audio
