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

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "af/common.hpp"
#include "af/corpus.hpp"
#include "af/detector.hpp"
#include "af/opt_attacks.hpp"

namespace fs = std::filesystem;
using af::corpus::Manifest;
using af::corpus::SynthSpec;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "af_test_corpus" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
}

std::string whole_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const af::Error& e) {
    return e.what();
  }
  return "";
}

SynthSpec small_spec() {
  SynthSpec spec;
  spec.n_per_class = 10;
  spec.duration = 0.2;
  spec.sample_rate = 16000;
  spec.rng_seed = 11;
  spec.artifact = af::corpus::ArtifactKind::hf_hiss;
  return spec;
}

}  // namespace

TEST_SUITE_BEGIN("corpus");

TEST_CASE("manifest round trips through save and load") {
  fs::path dir = fresh_dir("roundtrip");
  Manifest m;
  m.entries.push_back({"a/one.wav", 0, "train", "synth"});
  m.entries.push_back({"a/two.wav", 1, "dev", "synth"});
  m.entries.push_back({"b/three.wav", 1, "test", "other"});
  fs::path csv = dir / "manifest.csv";
  af::corpus::save_manifest(m, csv.string());

  Manifest back = af::corpus::load_manifest(csv.string());
  REQUIRE(back.entries.size() == 3);
  CHECK(back.root == dir.string());
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back.entries[i].path == m.entries[i].path);
    CHECK(back.entries[i].label == m.entries[i].label);
    CHECK(back.entries[i].split == m.entries[i].split);
    CHECK(back.entries[i].dataset_id == m.entries[i].dataset_id);
  }
  CHECK(back.resolve(back.entries[0]) == (dir / "a/one.wav").string());
}

TEST_CASE("manifest parser names the offending line") {
  fs::path dir = fresh_dir("parse");
  fs::path csv = dir / "m.csv";

  write_text(csv, "path;label;split;dataset_id\n");
  std::string msg = message_of([&] { af::corpus::load_manifest(csv.string()); });
  CHECK(msg.find("line 1") != std::string::npos);

  write_text(csv, "path,label,split,dataset_id\na.wav,spoof,train,synth\n");
  msg = message_of([&] { af::corpus::load_manifest(csv.string()); });
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("spoof") != std::string::npos);

  write_text(csv, "path,label,split,dataset_id\na.wav,real,train,synth\nb.wav,fake,dev\n");
  msg = message_of([&] { af::corpus::load_manifest(csv.string()); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("4 fields") != std::string::npos);

  write_text(csv,
             "path,label,split,dataset_id\na.wav,real,train,synth\na.wav,fake,train,synth\n");
  msg = message_of([&] { af::corpus::load_manifest(csv.string()); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("duplicate") != std::string::npos);

  write_text(csv, "path,label,split,dataset_id\na.wav,real,holdout,synth\n");
  msg = message_of([&] { af::corpus::load_manifest(csv.string()); });
  CHECK(msg.find("holdout") != std::string::npos);

  write_text(csv, "");
  CHECK_THROWS_AS(af::corpus::load_manifest(csv.string()), af::FormatError);
  CHECK_THROWS_AS(af::corpus::load_manifest((dir / "absent.csv").string()), af::IoError);
}

TEST_CASE("manifest parser tolerates CRLF line endings") {
  fs::path dir = fresh_dir("crlf");
  fs::path csv = dir / "m.csv";
  write_text(csv, "path,label,split,dataset_id\r\na.wav,real,train,synth\r\n");
  Manifest m = af::corpus::load_manifest(csv.string());
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].dataset_id == "synth");
}

TEST_CASE("split_view filters by split") {
  Manifest m;
  m.entries.push_back({"a.wav", 0, "train", "s"});
  m.entries.push_back({"b.wav", 1, "test", "s"});
  m.entries.push_back({"c.wav", 1, "train", "s"});
  CHECK(m.split_view("train").size() == 2);
  CHECK(m.split_view("test").size() == 1);
  CHECK(m.split_view("dev").empty());
}

TEST_CASE("synth corpus writes the expected files and splits") {
  fs::path dir = fresh_dir("synth");
  SynthSpec spec = small_spec();
  Manifest m = af::corpus::synth_corpus(spec, dir.string());

  REQUIRE(m.entries.size() == 20);
  size_t wavs = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".wav") ++wavs;
  }
  CHECK(wavs == 20);
  CHECK(fs::exists(dir / "manifest.csv"));

  // floor(0.15 * 10) = 1 clip per class in dev and in test, 8 in train.
  int split_counts[2][3] = {};
  for (const auto& e : m.entries) {
    int s = e.split == "train" ? 0 : (e.split == "dev" ? 1 : 2);
    ++split_counts[e.label][s];
  }
  for (int cls = 0; cls < 2; ++cls) {
    CHECK(split_counts[cls][0] == 8);
    CHECK(split_counts[cls][1] == 1);
    CHECK(split_counts[cls][2] == 1);
  }

  // Every clip decodes, has the right length and stays in range.
  for (const auto& e : m.entries) {
    af::audio::AudioClip c = af::audio::read_wav(m.resolve(e));
    CHECK(c.len() == 3200);
    CHECK(c.sample_rate == 16000);
  }
}

TEST_CASE("synthesis is bitwise deterministic in the seed") {
  SynthSpec spec = small_spec();
  af::audio::AudioClip a = af::corpus::synth_clip(spec, true, 3);
  af::audio::AudioClip b = af::corpus::synth_clip(spec, true, 3);
  CHECK(a.samples == b.samples);

  spec.rng_seed = 12;
  af::audio::AudioClip c = af::corpus::synth_clip(spec, true, 3);
  CHECK(a.samples != c.samples);

  fs::path d1 = fresh_dir("det1");
  fs::path d2 = fresh_dir("det2");
  spec.rng_seed = 11;
  af::corpus::synth_corpus(spec, d1.string());
  af::corpus::synth_corpus(spec, d2.string());
  CHECK(whole_file(d1 / "manifest.csv") == whole_file(d2 / "manifest.csv"));
  CHECK(whole_file(d1 / "real_0000.wav") == whole_file(d2 / "real_0000.wav"));
  CHECK(whole_file(d1 / "fake_0007.wav") == whole_file(d2 / "fake_0007.wav"));
}

TEST_CASE("clips differ across indices and classes") {
  SynthSpec spec = small_spec();
  auto r0 = af::corpus::synth_clip(spec, false, 0);
  auto r1 = af::corpus::synth_clip(spec, false, 1);
  auto f0 = af::corpus::synth_clip(spec, true, 0);
  CHECK(r0.samples != r1.samples);
  CHECK(r0.samples != f0.samples);
  CHECK(r0.id == "real_0000");
  CHECK(f0.id == "fake_0000");
}

TEST_CASE("synth validation rejects impossible settings") {
  SynthSpec spec = small_spec();
  spec.n_per_class = 0;
  CHECK_THROWS_AS(af::corpus::synth_clip(spec, false, 0), af::ParamError);
  spec = small_spec();
  spec.sample_rate = 12000;  // hiss band needs > 14 kHz
  CHECK_THROWS_AS(af::corpus::synth_clip(spec, true, 0), af::ParamError);
  spec = small_spec();
  CHECK_THROWS_AS(af::corpus::synth_clip(spec, false, 10), af::ParamError);
  CHECK_THROWS_AS(af::corpus::artifact_from_string("reverb"), af::ParamError);
}

TEST_CASE("attack cache misses then hits and round-trips the audio") {
  fs::path src_dir = fresh_dir("cache_src");
  SynthSpec spec = small_spec();
  spec.n_per_class = 3;
  Manifest m = af::corpus::synth_corpus(spec, src_dir.string());

  af::attacks::AttackSpec aspec;
  aspec.kind = af::attacks::AttackKind::noise_add;
  aspec.sigma = 0.05;
  aspec.seed = 7;

  fs::path cache = fresh_dir("cache_out");
  auto first = af::corpus::cache_attacked(m, aspec, cache.string());
  CHECK(first.hits == 0);
  CHECK(first.misses == 6);
  REQUIRE(first.manifest.entries.size() == 6);

  auto second = af::corpus::cache_attacked(m, aspec, cache.string());
  CHECK(second.hits == 6);
  CHECK(second.misses == 0);
  CHECK(second.manifest.entries[0].path == first.manifest.entries[0].path);

  // Cached audio equals the float32 image of the in-memory attack.
  for (size_t i = 0; i < m.entries.size(); ++i) {
    af::audio::AudioClip orig = af::audio::read_wav(m.resolve(m.entries[i]));
    af::audio::AudioClip want = af::attacks::apply_attack(nullptr, orig, m.entries[i].label,
                                                          aspec);
    af::audio::AudioClip got =
        af::audio::read_wav(first.manifest.resolve(first.manifest.entries[i]));
    REQUIRE(got.len() == want.len());
    for (size_t j = 0; j < want.len(); ++j) {
      CHECK(got.samples[j] == static_cast<double>(static_cast<float>(want.samples[j])));
    }
    // Labels and splits carry over.
    CHECK(first.manifest.entries[i].label == m.entries[i].label);
    CHECK(first.manifest.entries[i].split == m.entries[i].split);
  }
}

TEST_CASE("cache keys separate clips, parameters and seeds") {
  af::attacks::AttackSpec a;
  a.kind = af::attacks::AttackKind::noise_add;
  a.sigma = 0.05;
  a.seed = 7;
  af::attacks::AttackSpec b = a;
  b.sigma = 0.02;
  af::attacks::AttackSpec c = a;
  c.seed = 8;

  std::set<std::string> keys;
  keys.insert(af::corpus::cache_key(a, "clip_one"));
  keys.insert(af::corpus::cache_key(a, "clip_two"));
  keys.insert(af::corpus::cache_key(b, "clip_one"));
  keys.insert(af::corpus::cache_key(c, "clip_one"));
  CHECK(keys.size() == 4);

  // Same inputs, same key.
  CHECK(af::corpus::cache_key(a, "clip_one") == af::corpus::cache_key(a, "clip_one"));
}

TEST_CASE("gradient attacks require a model and fold its fingerprint into the key") {
  fs::path src_dir = fresh_dir("cache_grad_src");
  SynthSpec spec = small_spec();
  spec.n_per_class = 2;
  spec.duration = 0.05;  // 800 samples
  Manifest m = af::corpus::synth_corpus(spec, src_dir.string());

  af::attacks::AttackSpec aspec;
  aspec.kind = af::attacks::AttackKind::fgsm;
  aspec.eps = 0.01;

  fs::path cache = fresh_dir("cache_grad");
  CHECK_THROWS_AS(af::corpus::cache_attacked(m, aspec, cache.string()), af::ParamError);

  af::nn::Detector det1 = af::nn::make_raw_tiny(800, 1);
  af::nn::Detector det2 = af::nn::make_raw_tiny(800, 2);
  auto r1 = af::corpus::cache_attacked(m, aspec, cache.string(), &det1);
  CHECK(r1.misses == 4);
  auto r2 = af::corpus::cache_attacked(m, aspec, cache.string(), &det2);
  // A different set of weights may not reuse det1's cache entries.
  CHECK(r2.misses == 4);
  CHECK(r2.manifest.entries[0].path != r1.manifest.entries[0].path);
  auto r1_again = af::corpus::cache_attacked(m, aspec, cache.string(), &det1);
  CHECK(r1_again.hits == 4);
}

TEST_SUITE_END();
