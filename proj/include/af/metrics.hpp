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

#include "af/audio.hpp"
#include "af/stft.hpp"

namespace af::metrics {

// Scores follow one convention everywhere: higher = more likely fake.
// Labels use the class indices from model.hpp (0 = real, 1 = fake).

// Mann-Whitney statistic via average ranks: the fraction of (fake, real)
// pairs ranked correctly, ties worth one half. Both classes must be present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Equal error rate from the ROC staircase: walks the operating points of
// every distinct-score threshold and linearly interpolates the segment where
// FPR crosses FNR. Both classes must be present.
double eer(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  long long tn = 0;  // real predicted real
  long long fp = 0;  // real predicted fake
  long long fn = 0;  // fake predicted real
  long long tp = 0;  // fake predicted fake
  long long total() const { return tn + fp + fn + tp; }
};

// Predicts fake when score >= threshold.
Confusion confusion(std::span<const double> scores, std::span<const int> labels,
                    double threshold);
double accuracy(const Confusion& c);

// Mean squared per-sample difference.
double mse(std::span<const double> a, std::span<const double> b);

// Perceptibility view for one (original, attacked) pair: both log-mel grids
// mapped through the min-max normalization of the ORIGINAL grid, so the
// attacked view can leave [0, 1] when the attack adds energy.
struct QualityPair {
  audio::Spectrogram original_view;
  audio::Spectrogram attacked_view;
  double waveform_mse = 0.0;
};

QualityPair make_quality_pair(const audio::AudioClip& original,
                              const audio::AudioClip& attacked,
                              const audio::StftConfig& cfg = {});

// MSE over the normalized grids.
double spec_mse(const QualityPair& p);

// SSIM over the normalized grids: 11x11 Gaussian window (sigma 1.5), valid
// placements only, C1 = 0.01^2 and C2 = 0.03^2 for the unit dynamic range.
double ssim(const QualityPair& p);

}  // namespace af::metrics
