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

#include <string>
#include <vector>

#include "af/attack_spec.hpp"
#include "af/corpus.hpp"
#include "af/detector.hpp"
#include "af/report.hpp"
#include "af/stft.hpp"

namespace af::eval {

struct EvalOptions {
  std::string split = "test";
  double threshold = 0.5;  // fake probability above which a clip counts as fake
  int workers = 1;
  std::string cache_dir;   // reuse attacked audio from here; empty = in memory
  std::string images_dir;  // write confusion and triptych PNGs; empty = none
  audio::StftConfig front; // spectrogram view for the quality metrics
};

// One manifest split loaded into memory, order preserved, every clip length
// normalized to `target_len`.
struct SplitData {
  std::vector<audio::AudioClip> clips;
  std::vector<int> labels;
  std::vector<std::string> dataset_ids;
};

SplitData load_split(const corpus::Manifest& m, const std::string& split, size_t target_len);

// Fake-class probability per clip, computed on a worker pool but returned in
// clip order.
std::vector<double> score_clips(const nn::Detector& det,
                                const std::vector<audio::AudioClip>& clips, int workers);

// Full protocol: baseline row per dataset, then one row per (attack setting,
// dataset) with detection and quality metrics. Average rows are not added
// here; see report::append_family_averages.
report::Report evaluate(const nn::Detector& det, const std::string& detector_name,
                        const corpus::Manifest& manifest,
                        const std::vector<attacks::AttackSpec>& attacks,
                        const EvalOptions& opt);

// Default sweep: every attack kind over its full parameter grid.
std::vector<attacks::AttackSpec> default_attack_sweep(uint64_t seed);

}  // namespace af::eval
