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

#include <span>
#include <string>
#include <vector>

namespace af::audio {

// Mono waveform, nominal range [-1, 1]. Values outside the range are legal
// in memory (attack outputs are not clamped); the 16-bit writer clips.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string id;  // provenance tag used for cache keys and derived seeds

  size_t len() const { return samples.size(); }
};

void validate(const AudioClip& c);  // throws on empty samples or rate <= 0

enum class WavEncoding { pcm16, float32 };

// RIFF/WAVE reader: PCM16 and IEEE float32, any channel count (averaged to
// mono). PCM16 decodes as s / 32768.
AudioClip read_wav(const std::string& path);
void write_wav(const std::string& path, const AudioClip& clip,
               WavEncoding enc = WavEncoding::pcm16);

// Wrap-pad shorter clips / truncate longer ones to exactly target_len.
AudioClip normalize_length(const AudioClip& c, size_t target_len);

// Band-limited resampling, 64-tap Kaiser-windowed sinc, cutoff min(1, ratio).
// Output length = round(len * new_rate / old_rate).
AudioClip resample(const AudioClip& c, int new_rate);

// Same filter, arbitrary ratio (out/in), keeping the original sample rate tag.
std::vector<double> resample_by_ratio(std::span<const double> x, double ratio);

}  // namespace af::audio
