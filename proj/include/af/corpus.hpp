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
#include <string>
#include <vector>

#include "af/attack_spec.hpp"
#include "af/audio.hpp"
#include "af/model.hpp"

namespace af::corpus {

struct ManifestEntry {
  std::string path;  // relative to the manifest root unless absolute
  int label = 0;     // class indices from model.hpp
  std::string split; // train, dev or test
  std::string dataset_id;
};

struct Manifest {
  std::string root;
  std::vector<ManifestEntry> entries;

  std::string resolve(const ManifestEntry& e) const;
  std::vector<const ManifestEntry*> split_view(const std::string& split) const;
};

// CSV with header exactly "path,label,split,dataset_id". Parse errors name
// the offending line.
Manifest load_manifest(const std::string& csv_path);
void save_manifest(const Manifest& m, const std::string& csv_path);

const char* label_name(int label);
int label_from_string(const std::string& s, size_t line_no);

enum class ArtifactKind { spectral_notch = 0, hf_hiss = 1, phase_jitter = 2 };
const char* to_string(ArtifactKind k);
ArtifactKind artifact_from_string(const std::string& s);

struct SynthSpec {
  int n_per_class = 10;
  double duration = 1.0;
  int sample_rate = 16000;
  uint64_t rng_seed = 0;
  ArtifactKind artifact = ArtifactKind::hf_hiss;
};

// Harmonic "real" clips and artifact-bearing "fake" twins, written as PCM16
// WAVs plus manifest.csv. Per-class splits use floor(15%) for dev and test
// with the remainder in train, so every split stays class balanced.
Manifest synth_corpus(const SynthSpec& spec, const std::string& out_dir);

// One synthesized clip without touching the filesystem. `fake` selects the
// artifact branch; `index` picks the clip identity within its class.
audio::AudioClip synth_clip(const SynthSpec& spec, bool fake, int index);

struct CacheResult {
  Manifest manifest;  // mirrors the source entries, paths point into the cache
  size_t hits = 0;
  size_t misses = 0;
};

// Applies the attack to every manifest entry, storing float32 WAVs under
// out_dir/<attack-kind>/<key>.wav with key = hash(spec, clip id). Existing
// files are trusted and skipped. `model` is required for gradient attacks;
// its parameter fingerprint becomes part of the key.
CacheResult cache_attacked(const Manifest& src, attacks::AttackSpec spec,
                           const std::string& out_dir, const nn::GradModel* model = nullptr);

// Key derivation exposed for collision checks.
std::string cache_key(const attacks::AttackSpec& spec, const std::string& clip_id);

}  // namespace af::corpus
