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

#include <cstdint>

#include "af/audio.hpp"

namespace af::attacks {

// Signal-level transforms. All preserve length, sample rate and id, and none
// clamp the output range.

// Phase-vocoder time stretch by 2^(semitones/12) followed by resampling at
// the exact inverse ratio; n = 0 bypasses. Output trimmed/padded to input
// length.
audio::AudioClip pitch_shift(const audio::AudioClip& c, int semitones);

// Sliding median, odd kernel length, edge-replicated padding.
audio::AudioClip median_filter(const audio::AudioClip& c, int kernel);

// i.i.d. Gaussian noise with standard deviation sigma, deterministic in seed.
audio::AudioClip noise_add(const audio::AudioClip& c, double sigma, uint64_t seed);

// Uniform mid-tread requantization to b bits over [-1, 1] (input clamped
// first, round half away from zero). Idempotent.
audio::AudioClip quantize(const audio::AudioClip& c, int bits);

}  // namespace af::attacks
