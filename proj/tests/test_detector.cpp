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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <vector>

#include <doctest.h>

#include "af/common.hpp"
#include "af/detector.hpp"
#include "af/model.hpp"
#include "af/opt_attacks.hpp"
#include "af/rng.hpp"
#include "af/train.hpp"

namespace fs = std::filesystem;
using af::nn::Detector;

namespace {

constexpr int kLen = 2048;

std::vector<double> random_wave(uint64_t seed, size_t n, double amp = 0.5) {
  af::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-amp, amp);
  return x;
}

double loss_at(const Detector& det, std::span<const double> x, int label) {
  return af::nn::cross_entropy(det.logits(x), label);
}

// Central-difference check of the waveform gradient of the cross entropy.
// The spectrogram net needs a finer step: log-mel curvature at weak bins
// otherwise dominates the truncation term.
void check_input_grad(const Detector& det, uint64_t seed, double h = 1e-3) {
  std::vector<double> x = random_wave(seed, det.input_len());
  std::vector<double> grad;
  af::nn::loss_and_input_grad(det, x, af::nn::kClassFake, grad);
  REQUIRE(grad.size() == x.size());

  af::Rng pick(seed + 1);
  int checked = 0;
  for (int probe = 0; probe < 40 && checked < 20; ++probe) {
    size_t i = pick.below(x.size());
    double keep = x[i];
    x[i] = keep + h;
    double jp = loss_at(det, x, af::nn::kClassFake);
    x[i] = keep - h;
    double jm = loss_at(det, x, af::nn::kClassFake);
    x[i] = keep;
    double want = (jp - jm) / (2.0 * h);
    if (std::abs(want) < 1e-8) continue;  // dead relu region tells us nothing
    ++checked;
    CHECK(std::abs(want - grad[i]) / std::max(std::abs(want), std::abs(grad[i])) < 1e-4);
  }
  CHECK(checked >= 10);
}

// Central-difference check of dJ/dtheta from net_backward.
void check_param_grad(Detector& det, uint64_t seed, double h = 1e-3) {
  std::vector<double> x = random_wave(seed, det.input_len());
  std::vector<double> feat = det.features(x);

  af::nn::NetState st;
  auto z = det.net_forward(feat, st);
  auto up = af::nn::cross_entropy_logit_grad(z, af::nn::kClassReal);
  std::vector<double> grad(det.param_count(), 0.0);
  det.net_backward(st, up, &grad, nullptr);

  af::Rng pick(seed + 2);
  int checked = 0;
  for (int probe = 0; probe < 60 && checked < 20; ++probe) {
    size_t j = pick.below(det.param_count());
    double keep = det.params[j];
    det.params[j] = keep + h;
    double jp = af::nn::cross_entropy(det.net_forward(feat, st), af::nn::kClassReal);
    det.params[j] = keep - h;
    double jm = af::nn::cross_entropy(det.net_forward(feat, st), af::nn::kClassReal);
    det.params[j] = keep;
    double want = (jp - jm) / (2.0 * h);
    if (std::abs(want) < 1e-8) continue;
    ++checked;
    CHECK(std::abs(want - grad[j]) / std::max(std::abs(want), std::abs(grad[j])) < 1e-4);
  }
  CHECK(checked >= 10);
}

}  // namespace

TEST_SUITE_BEGIN("detector");

TEST_CASE("raw detector input gradient matches finite differences") {
  Detector det = af::nn::make_raw_tiny(kLen, 7);
  check_input_grad(det, 100);
}

TEST_CASE("spectrogram detector input gradient matches finite differences") {
  Detector det = af::nn::make_spec_tiny(kLen, 7);
  check_input_grad(det, 101, 1e-5);
}

TEST_CASE("raw detector parameter gradient matches finite differences") {
  Detector det = af::nn::make_raw_tiny(kLen, 8);
  check_param_grad(det, 102);
}

TEST_CASE("spectrogram detector parameter gradient matches finite differences") {
  Detector det = af::nn::make_spec_tiny(kLen, 8);
  check_param_grad(det, 103, 1e-5);
}

TEST_CASE("logit_grad combines the two logit gradients linearly") {
  Detector det = af::nn::make_raw_tiny(kLen, 9);
  std::vector<double> x = random_wave(200, det.input_len());
  auto g10 = det.logit_grad(x, {1.0, 0.0});
  auto g01 = det.logit_grad(x, {0.0, 1.0});
  auto gmix = det.logit_grad(x, {0.75, -0.5});
  for (size_t i = 0; i < x.size(); i += 97) {
    CHECK(gmix[i] == doctest::Approx(0.75 * g10[i] - 0.5 * g01[i]).epsilon(1e-9));
  }
}

TEST_CASE("zeroed final layer yields equal logits and ln 2 loss") {
  Detector det = af::nn::make_raw_tiny(kLen, 10);
  for (auto& s : det.slices) {
    if (s.name.find("dense") != std::string::npos) {
      for (size_t i = 0; i < s.size; ++i) det.params[s.offset + i] = 0.0;
    }
  }
  std::vector<double> x = random_wave(300, det.input_len());
  auto z = det.logits(x);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);
  CHECK(af::nn::cross_entropy(z, 0) == doctest::Approx(std::log(2.0)));
  CHECK(af::nn::cross_entropy(z, 1) == doctest::Approx(std::log(2.0)));
  CHECK(af::nn::fake_score(z) == doctest::Approx(0.5));
}

TEST_CASE("initialization is deterministic in the seed") {
  Detector a = af::nn::make_raw_tiny(kLen, 42);
  Detector b = af::nn::make_raw_tiny(kLen, 42);
  Detector c = af::nn::make_raw_tiny(kLen, 43);
  CHECK(a.params == b.params);
  CHECK(a.params != c.params);
  CHECK(a.param_fingerprint() == b.param_fingerprint());
  CHECK(a.param_fingerprint() != c.param_fingerprint());
}

TEST_CASE("initialization bounds follow fan-in and biases start at zero") {
  Detector det = af::nn::make_raw_tiny(kLen, 11);
  // Slices appear in layer order for the parameterized layers; each slice
  // stores weights first, then out-channel biases.
  size_t si = 0;
  for (const auto& l : det.layers) {
    size_t weights = 0, biases = 0;
    int fi = 0;
    if (l.kind == af::nn::LayerKind::conv1d) {
      weights = static_cast<size_t>(l.out_ch) * l.in_ch * l.kernel;
      biases = static_cast<size_t>(l.out_ch);
      fi = l.in_ch * l.kernel;
    } else if (l.kind == af::nn::LayerKind::dense) {
      weights = static_cast<size_t>(l.out_dim) * l.in_dim;
      biases = static_cast<size_t>(l.out_dim);
      fi = l.in_dim;
    } else {
      continue;
    }
    REQUIRE(si < det.slices.size());
    const auto& s = det.slices[si++];
    REQUIRE(s.size == weights + biases);
    double bound = 1.0 / std::sqrt(static_cast<double>(fi));
    double max_w = 0.0;
    for (size_t i = 0; i < weights; ++i) {
      max_w = std::max(max_w, std::abs(det.params[s.offset + i]));
    }
    CHECK(max_w <= bound);
    CHECK(max_w > 0.25 * bound);  // the draw actually filled the range
    for (size_t i = weights; i < s.size; ++i) CHECK(det.params[s.offset + i] == 0.0);
  }
  CHECK(si == det.slices.size());
}

TEST_CASE("forward pass is deterministic") {
  Detector det = af::nn::make_spec_tiny(kLen, 12);
  std::vector<double> x = random_wave(400, det.input_len());
  auto z1 = det.logits(x);
  auto z2 = det.logits(x);
  CHECK(z1[0] == z2[0]);
  CHECK(z1[1] == z2[1]);
}

TEST_CASE("detector rejects mismatched input length") {
  Detector det = af::nn::make_raw_tiny(kLen, 13);
  std::vector<double> x(kLen + 1, 0.0);
  CHECK_THROWS_AS(det.logits(x), af::ShapeError);
}

TEST_CASE("non-finite input is reported as a numeric error") {
  Detector det = af::nn::make_raw_tiny(kLen, 14);
  std::vector<double> x(kLen, 0.0);
  x[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(det.logits(x), af::NumericError);
}

TEST_CASE("checkpoint round trip is bit exact") {
  fs::path dir = fs::temp_directory_path() / "af_test_ckpt";
  fs::create_directories(dir);
  fs::path p = dir / "det.ck";

  Detector det = af::nn::make_spec_tiny(kLen, 77);
  det.defended = 1;
  af::nn::save_checkpoint(p.string(), det);
  Detector back = af::nn::load_checkpoint(p.string());

  CHECK(back.kind == det.kind);
  CHECK(back.input_samples == det.input_samples);
  CHECK(back.sample_rate == det.sample_rate);
  CHECK(back.init_seed == det.init_seed);
  CHECK(back.defended == 1);
  CHECK(back.layers.size() == det.layers.size());
  REQUIRE(back.params.size() == det.params.size());
  CHECK(back.params == det.params);
  CHECK(back.param_fingerprint() == det.param_fingerprint());

  std::vector<double> x = random_wave(500, det.input_len());
  auto z1 = det.logits(x);
  auto z2 = back.logits(x);
  CHECK(z1[0] == z2[0]);
  CHECK(z1[1] == z2[1]);
}

TEST_CASE("checkpoint loader rejects corrupt files") {
  fs::path dir = fs::temp_directory_path() / "af_test_ckpt";
  fs::create_directories(dir);
  fs::path p = dir / "bad.ck";
  {
    std::FILE* f = std::fopen(p.string().c_str(), "wb");
    std::fputs("AFXX garbage", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(af::nn::load_checkpoint(p.string()), af::FormatError);
  CHECK_THROWS_AS(af::nn::load_checkpoint((dir / "absent.ck").string()), af::IoError);

  // Truncated but valid prefix.
  Detector det = af::nn::make_raw_tiny(kLen, 1);
  fs::path full = dir / "full.ck";
  af::nn::save_checkpoint(full.string(), det);
  auto sz = fs::file_size(full);
  fs::path cut = dir / "cut.ck";
  {
    std::ifstream in(full, std::ios::binary);
    std::vector<char> bytes(sz / 2);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::ofstream out(cut, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(af::nn::load_checkpoint(cut.string()), af::FormatError);
}

TEST_CASE("training reduces the loss on separable data") {
  // Loud versus quiet: trivially separable by energy.
  std::vector<std::vector<double>> waves;
  std::vector<int> labels;
  for (int i = 0; i < 24; ++i) {
    waves.push_back(random_wave(600 + i, kLen, i % 2 == 0 ? 0.8 : 0.05));
    labels.push_back(i % 2 == 0 ? af::nn::kClassFake : af::nn::kClassReal);
  }
  Detector det = af::nn::make_raw_tiny(kLen, 21);
  af::nn::TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.lr = 3e-3;
  cfg.weight_decay = 0.0;
  af::nn::TrainResult res = af::nn::train(det, waves, labels, cfg);
  REQUIRE(res.epoch_loss.size() == 30);
  CHECK(res.steps == 30 * 3);
  CHECK(res.epoch_loss.back() < 0.5 * res.epoch_loss.front());
}

TEST_CASE("training is deterministic in the seed") {
  std::vector<std::vector<double>> waves;
  std::vector<int> labels;
  for (int i = 0; i < 8; ++i) {
    waves.push_back(random_wave(700 + i, kLen, 0.4));
    labels.push_back(i % 2);
  }
  af::nn::TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.lr = 1e-3;
  Detector a = af::nn::make_raw_tiny(kLen, 5);
  Detector b = af::nn::make_raw_tiny(kLen, 5);
  af::nn::train(a, waves, labels, cfg);
  af::nn::train(b, waves, labels, cfg);
  CHECK(a.params == b.params);
}

TEST_CASE("training validates its configuration and data") {
  std::vector<std::vector<double>> waves{random_wave(1, kLen), random_wave(2, kLen)};
  std::vector<int> labels{0, 1};
  Detector det = af::nn::make_raw_tiny(kLen, 3);
  af::nn::TrainConfig cfg;

  cfg.epochs = 0;
  CHECK_THROWS_AS(af::nn::train(det, waves, labels, cfg), af::ParamError);
  cfg = {};
  cfg.lr = 0.0;
  CHECK_THROWS_AS(af::nn::train(det, waves, labels, cfg), af::ParamError);
  cfg = {};
  CHECK_THROWS_AS(af::nn::train(det, {}, {}, cfg), af::DataError);

  std::vector<int> one_class{1, 1};
  CHECK_THROWS_AS(af::nn::train(det, waves, one_class, cfg), af::ParamError);

  std::vector<std::vector<double>> short_wave{random_wave(1, 100), random_wave(2, kLen)};
  CHECK_THROWS_AS(af::nn::train(det, short_wave, labels, cfg), af::DataError);
}

TEST_CASE("adversarial training marks the checkpoint as defended") {
  std::vector<std::vector<double>> waves;
  std::vector<int> labels;
  for (int i = 0; i < 8; ++i) {
    waves.push_back(random_wave(800 + i, kLen, i % 2 == 0 ? 0.6 : 0.1));
    labels.push_back(i % 2 == 0 ? 1 : 0);
  }
  Detector det = af::nn::make_raw_tiny(kLen, 6);
  CHECK(det.defended == 0);
  af::nn::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 4;
  cfg.lr = 1e-3;
  af::attacks::AttackSpec spec;
  spec.kind = af::attacks::AttackKind::fgsm;
  spec.eps = 0.01;
  af::nn::adversarial_train(det, waves, labels, cfg, spec, 0.5);
  CHECK(det.defended == 1);

  af::attacks::AttackSpec stat;
  stat.kind = af::attacks::AttackKind::quantize;
  Detector det2 = af::nn::make_raw_tiny(kLen, 6);
  CHECK_THROWS_AS(af::nn::adversarial_train(det2, waves, labels, cfg, stat, 0.5),
                  af::ParamError);
}

TEST_CASE("random crafter draws per-example attack settings deterministically") {
  af::nn::AdvCrafter crafter = af::nn::random_attack_crafter(af::attacks::all_attack_kinds());
  REQUIRE(crafter.craft);
  Detector det = af::nn::make_raw_tiny(kLen, 30);
  std::vector<double> wave = random_wave(900, kLen, 0.3);
  auto a = crafter.craft(det, wave, 1, 555);
  auto b = crafter.craft(det, wave, 1, 555);
  auto c = crafter.craft(det, wave, 1, 556);
  CHECK(a == b);
  CHECK(a.size() == wave.size());
  CHECK(c.size() == wave.size());
  CHECK_THROWS_AS(af::nn::random_attack_crafter({}), af::ParamError);
}

TEST_CASE("random crafter falls back to the clean wave when the attack stalls") {
  // All-zero parameters give constant logits and a zero input gradient, so
  // deepfool raises NumericError. The crafter must hand back the clean sample
  // rather than abort the surrounding training loop.
  Detector det = af::nn::make_raw_tiny(kLen, 31);
  std::fill(det.params.begin(), det.params.end(), 0.0);
  std::vector<double> wave = random_wave(901, kLen, 0.3);

  af::attacks::AttackSpec spec;
  spec.kind = af::attacks::AttackKind::deepfool;
  CHECK_THROWS_AS(af::attacks::deepfool(det, wave, 0, spec), af::NumericError);

  af::nn::AdvCrafter crafter =
      af::nn::random_attack_crafter({af::attacks::AttackKind::deepfool});
  auto crafted = crafter.craft(det, wave, 0, 57);
  CHECK(crafted == wave);
}

TEST_SUITE_END();
