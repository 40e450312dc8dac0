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

#include "af/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "af/common.hpp"
#include "af/detector.hpp"
#include "af/kernels.hpp"
#include "af/opt_attacks.hpp"
#include "af/rng.hpp"
#include "af/stft.hpp"

namespace fs = std::filesystem;

namespace af::corpus {

namespace {

constexpr const char* kHeader = "path,label,split,dataset_id";

bool valid_split(const std::string& s) { return s == "train" || s == "dev" || s == "test"; }

}  // namespace

const char* label_name(int label) { return label == nn::kClassFake ? "fake" : "real"; }

int label_from_string(const std::string& s, size_t line_no) {
  if (s == "real") return nn::kClassReal;
  if (s == "fake") return nn::kClassFake;
  throw FormatError("manifest line " + std::to_string(line_no) + ": unknown label '" + s +
                    "' (expected real or fake)");
}

std::string Manifest::resolve(const ManifestEntry& e) const {
  fs::path p(e.path);
  if (p.is_absolute() || root.empty()) return e.path;
  return (fs::path(root) / p).string();
}

std::vector<const ManifestEntry*> Manifest::split_view(const std::string& split) const {
  std::vector<const ManifestEntry*> out;
  for (const ManifestEntry& e : entries) {
    if (e.split == split) out.push_back(&e);
  }
  return out;
}

Manifest load_manifest(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open manifest: " + csv_path);

  Manifest m;
  m.root = fs::path(csv_path).parent_path().string();

  std::string line;
  size_t line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kHeader) {
        throw FormatError("manifest line 1: header must be exactly '" + std::string(kHeader) +
                          "'");
      }
      continue;
    }
    if (line.empty()) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": empty row");
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 4) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }
    ManifestEntry e;
    e.path = fields[0];
    if (e.path.empty()) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": empty path");
    }
    if (!seen.insert(e.path).second) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": duplicate path '" +
                        e.path + "'");
    }
    e.label = label_from_string(fields[1], line_no);
    e.split = fields[2];
    if (!valid_split(e.split)) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": unknown split '" +
                        e.split + "' (expected train, dev or test)");
    }
    e.dataset_id = fields[3];
    m.entries.push_back(std::move(e));
  }
  if (line_no == 0) throw FormatError("manifest is empty: " + csv_path);
  return m;
}

void save_manifest(const Manifest& m, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + csv_path);
  out << kHeader << '\n';
  for (const ManifestEntry& e : m.entries) {
    out << e.path << ',' << label_name(e.label) << ',' << e.split << ',' << e.dataset_id << '\n';
  }
  if (!out) throw IoError("short write on manifest: " + csv_path);
}

const char* to_string(ArtifactKind k) {
  switch (k) {
    case ArtifactKind::spectral_notch: return "spectral_notch";
    case ArtifactKind::hf_hiss: return "hf_hiss";
    case ArtifactKind::phase_jitter: return "phase_jitter";
  }
  return "?";
}

ArtifactKind artifact_from_string(const std::string& s) {
  if (s == "spectral_notch") return ArtifactKind::spectral_notch;
  if (s == "hf_hiss") return ArtifactKind::hf_hiss;
  if (s == "phase_jitter") return ArtifactKind::phase_jitter;
  throw ParamError("unknown artifact kind '" + s +
                   "' (expected spectral_notch, hf_hiss or phase_jitter)");
}

namespace {

constexpr double kNoiseFloorStd = 0.01;   // -40 dBFS
constexpr double kHissStd = 0.05623413;   // -25 dBFS
constexpr double kTonePeak = 0.5;

void validate_synth(const SynthSpec& spec) {
  if (spec.n_per_class < 1) throw ParamError("synth: n_per_class must be >= 1");
  if (!(spec.duration > 0.0)) throw ParamError("synth: duration must be positive");
  if (spec.sample_rate < 8000) throw ParamError("synth: sample rate must be >= 8000");
  double nyq = spec.sample_rate / 2.0;
  if (spec.artifact == ArtifactKind::hf_hiss && nyq <= 7000.0) {
    throw ParamError("synth: hf_hiss needs a sample rate above 14 kHz");
  }
  if (spec.artifact == ArtifactKind::spectral_notch && nyq <= 2500.0) {
    throw ParamError("synth: spectral_notch needs a sample rate above 5 kHz");
  }
}

void add_hf_hiss(std::vector<double>& x, int sample_rate, Rng& rng) {
  constexpr int kComponents = 200;
  double lo = 5000.0, hi = 7000.0;
  double amp = kHissStd * std::sqrt(2.0 / kComponents);
  double dt = 1.0 / sample_rate;
  std::vector<double> freq(kComponents), phase(kComponents);
  for (int k = 0; k < kComponents; ++k) {
    freq[k] = lo + (k + 0.5) * (hi - lo) / kComponents;
    phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  for (size_t i = 0; i < x.size(); ++i) {
    double t = static_cast<double>(i) * dt;
    double acc = 0.0;
    for (int k = 0; k < kComponents; ++k) {
      acc += std::cos(2.0 * std::numbers::pi * freq[k] * t + phase[k]);
    }
    x[i] += amp * acc;
  }
}

void apply_notch(audio::AudioClip& clip) {
  audio::StftConfig cfg;
  if (clip.len() < static_cast<size_t>(cfg.window_len)) return;
  audio::ComplexGrid grid = audio::stft(clip, cfg);
  double bin_hz = static_cast<double>(clip.sample_rate) / cfg.fft_size;
  for (size_t f = 0; f < grid.frames; ++f) {
    for (size_t b = 0; b < grid.bins; ++b) {
      double hz = static_cast<double>(b) * bin_hz;
      if (hz >= 2000.0 && hz <= 2500.0) grid.at(f, b) = 0.0;
    }
  }
  clip.samples = audio::istft(grid, cfg, clip.sample_rate, clip.len()).samples;
}

void apply_phase_jitter(audio::AudioClip& clip, Rng& rng) {
  audio::StftConfig cfg;
  if (clip.len() < static_cast<size_t>(cfg.window_len)) return;
  audio::ComplexGrid grid = audio::stft(clip, cfg);
  for (size_t f = 0; f < grid.frames; ++f) {
    double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
    std::complex<double> rot(std::cos(theta), std::sin(theta));
    for (size_t b = 0; b < grid.bins; ++b) grid.at(f, b) *= rot;
  }
  clip.samples = audio::istft(grid, cfg, clip.sample_rate, clip.len()).samples;
}

std::string clip_name(bool fake, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d", fake ? "fake" : "real", index);
  return buf;
}

}  // namespace

audio::AudioClip synth_clip(const SynthSpec& spec, bool fake, int index) {
  validate_synth(spec);
  if (index < 0 || index >= spec.n_per_class) throw ParamError("synth: clip index out of range");

  audio::AudioClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.id = clip_name(fake, index);
  size_t len = static_cast<size_t>(std::llround(spec.duration * spec.sample_rate));
  clip.samples.assign(len, 0.0);

  Rng rng(hash_combine(hash_combine(spec.rng_seed, "clip"), clip.id));

  double f0 = rng.uniform(90.0, 300.0);
  int harmonics = 3 + static_cast<int>(rng.below(4));
  std::vector<double> amp(harmonics), ph(harmonics);
  for (int h = 0; h < harmonics; ++h) {
    amp[h] = rng.uniform(0.5, 1.0) / (h + 1);
    ph[h] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  double am_hz = rng.uniform(0.5, 4.0);
  double am_depth = rng.uniform(0.1, 0.4);
  double am_ph = rng.uniform(0.0, 2.0 * std::numbers::pi);

  double dt = 1.0 / spec.sample_rate;
  for (size_t i = 0; i < len; ++i) {
    double t = static_cast<double>(i) * dt;
    double tone = 0.0;
    for (int h = 0; h < harmonics; ++h) {
      tone += amp[h] * std::sin(2.0 * std::numbers::pi * f0 * (h + 1) * t + ph[h]);
    }
    tone *= 1.0 + am_depth * std::sin(2.0 * std::numbers::pi * am_hz * t + am_ph);
    clip.samples[i] = tone;
  }
  double peak = kernels::max_abs(clip.samples.data(), len);
  if (peak > 0.0) kernels::scale(clip.samples.data(), kTonePeak / peak, len);
  for (size_t i = 0; i < len; ++i) clip.samples[i] += kNoiseFloorStd * rng.normal();

  if (fake) {
    switch (spec.artifact) {
      case ArtifactKind::hf_hiss:
        add_hf_hiss(clip.samples, spec.sample_rate, rng);
        break;
      case ArtifactKind::spectral_notch:
        apply_notch(clip);
        break;
      case ArtifactKind::phase_jitter:
        apply_phase_jitter(clip, rng);
        break;
    }
  }
  return clip;
}

Manifest synth_corpus(const SynthSpec& spec, const std::string& out_dir) {
  validate_synth(spec);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create corpus directory: " + out_dir + ": " + ec.message());

  int n = spec.n_per_class;
  int n_dev = static_cast<int>(std::floor(0.15 * n));
  int n_test = static_cast<int>(std::floor(0.15 * n));
  int n_train = n - n_dev - n_test;

  Manifest m;
  m.root = out_dir;
  for (int cls = 0; cls < 2; ++cls) {
    bool fake = cls == 1;
    for (int i = 0; i < n; ++i) {
      audio::AudioClip clip = synth_clip(spec, fake, i);
      std::string file = clip.id + ".wav";
      audio::write_wav((fs::path(out_dir) / file).string(), clip,
                       audio::WavEncoding::pcm16);
      ManifestEntry e;
      e.path = file;
      e.label = fake ? nn::kClassFake : nn::kClassReal;
      e.split = i < n_train ? "train" : (i < n_train + n_dev ? "dev" : "test");
      e.dataset_id = "synth";
      m.entries.push_back(std::move(e));
    }
  }
  save_manifest(m, (fs::path(out_dir) / "manifest.csv").string());
  return m;
}

std::string cache_key(const attacks::AttackSpec& spec, const std::string& clip_id) {
  uint64_t h = hash64(spec.canonical() + "\n" + clip_id);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CacheResult cache_attacked(const Manifest& src, attacks::AttackSpec spec,
                           const std::string& out_dir, const nn::GradModel* model) {
  if (attacks::is_gradient_attack(spec.kind)) {
    if (model == nullptr) throw ParamError("attack cache: gradient attacks need a detector");
    if (spec.model_tag.empty()) {
      if (const auto* det = dynamic_cast<const nn::Detector*>(model)) {
        spec.model_tag = det->param_fingerprint();
      } else {
        throw ParamError("attack cache: set model_tag for non-checkpoint models");
      }
    }
  }

  fs::path dir = fs::path(out_dir) / attacks::to_string(spec.kind);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create cache directory: " + dir.string() + ": " + ec.message());

  CacheResult res;
  res.manifest.root = out_dir;
  for (const ManifestEntry& e : src.entries) {
    std::string id = fs::path(e.path).stem().string();
    std::string key = cache_key(spec, id);
    fs::path file = dir / (key + ".wav");

    if (fs::exists(file)) {
      ++res.hits;
    } else {
      ++res.misses;
      audio::AudioClip clip = audio::read_wav(src.resolve(e));
      audio::AudioClip attacked = attacks::apply_attack(model, clip, e.label, spec);
      fs::path tmp = dir / (key + ".wav.tmp");
      audio::write_wav(tmp.string(), attacked, audio::WavEncoding::float32);
      fs::rename(tmp, file, ec);
      if (ec) throw IoError("cache rename failed: " + file.string() + ": " + ec.message());
    }

    ManifestEntry out = e;
    out.path = (fs::path(attacks::to_string(spec.kind)) / (key + ".wav")).string();
    res.manifest.entries.push_back(std::move(out));
  }
  return res;
}

}  // namespace af::corpus
