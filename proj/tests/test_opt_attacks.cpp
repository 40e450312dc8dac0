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
#include <span>
#include <vector>

#include <doctest.h>

#include "af/common.hpp"
#include "af/kernels.hpp"
#include "af/model.hpp"
#include "af/opt_attacks.hpp"
#include "af/rng.hpp"

using af::attacks::AttackKind;
using af::attacks::AttackSpec;

namespace {

// Z0 = 0, Z1 = w . x + b: every attack has a closed form against this model.
class LinearModel : public af::nn::GradModel {
 public:
  LinearModel(std::vector<double> w, double b) : w_(std::move(w)), b_(b) {}

  size_t input_len() const override { return w_.size(); }

  std::array<double, 2> logits(std::span<const double> x) const override {
    return {0.0, af::kernels::dot(w_.data(), x.data(), w_.size()) + b_};
  }

  std::vector<double> logit_grad(std::span<const double>,
                                 std::array<double, 2> gz) const override {
    std::vector<double> g(w_.size());
    for (size_t i = 0; i < w_.size(); ++i) g[i] = gz[1] * w_[i];
    return g;
  }

  double w_norm() const { return std::sqrt(af::kernels::sumsq(w_.data(), w_.size())); }
  const std::vector<double>& w() const { return w_; }

 private:
  std::vector<double> w_;
  double b_;
};

LinearModel default_model() {
  return LinearModel({0.5, -1.0, 0.25, 0.0, 2.0, -0.125, 0.75, -0.375}, 0.1);
}

std::vector<double> default_x() {
  return {0.2, -0.1, 0.3, 0.5, 0.15, -0.2, 0.05, 0.4};
}

double linf(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double ce_loss(const af::nn::GradModel& m, std::span<const double> x, int label) {
  return af::nn::cross_entropy(m.logits(x), label);
}

}  // namespace

TEST_SUITE_BEGIN("opt_attacks");

TEST_CASE("fgsm on a linear model steps along sign(w) exactly") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  // For the real label the loss rises with Z1, so dJ/dx = sigmoid(Z1) * w and
  // the sign step follows sign(w) elementwise, with zero weights untouched.
  auto res = af::attacks::fgsm(m, x, af::nn::kClassReal, 0.05);
  REQUIRE(res.adversarial.size() == x.size());
  CHECK(res.iterations == 1);
  for (size_t i = 0; i < x.size(); ++i) {
    double sign = m.w()[i] > 0 ? 1.0 : (m.w()[i] < 0 ? -1.0 : 0.0);
    CHECK(res.adversarial[i] == doctest::Approx(x[i] + 0.05 * sign));
  }
  // For the fake label the step flips.
  auto res2 = af::attacks::fgsm(m, x, af::nn::kClassFake, 0.05);
  for (size_t i = 0; i < x.size(); ++i) {
    double sign = m.w()[i] > 0 ? 1.0 : (m.w()[i] < 0 ? -1.0 : 0.0);
    CHECK(res2.adversarial[i] == doctest::Approx(x[i] - 0.05 * sign));
  }
}

TEST_CASE("fgsm with zero budget is the identity") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  auto res = af::attacks::fgsm(m, x, 0, 0.0);
  CHECK(res.adversarial == x);
}

TEST_CASE("fgsm rejects negative epsilon and bad labels") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  CHECK_THROWS_AS(af::attacks::fgsm(m, x, 0, -0.1), af::ParamError);
  CHECK_THROWS_AS(af::attacks::fgsm(m, x, 2, 0.1), af::ParamError);
  std::vector<double> bad(3, 0.0);
  CHECK_THROWS_AS(af::attacks::fgsm(m, bad, 0, 0.1), af::ShapeError);
}

TEST_CASE("pgd stays in the box and does at least as well as fgsm") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  AttackSpec spec;
  spec.kind = AttackKind::pgd;
  spec.eps = 0.05;
  spec.pgd_steps = 20;
  spec.seed = 3;

  auto p = af::attacks::pgd(m, x, af::nn::kClassReal, spec);
  CHECK(p.iterations == 20);
  CHECK(linf(p.adversarial, x) <= spec.eps + 1e-12);

  auto f = af::attacks::fgsm(m, x, af::nn::kClassReal, spec.eps);
  CHECK(ce_loss(m, p.adversarial, 0) >= ce_loss(m, f.adversarial, 0) - 1e-9);
}

TEST_CASE("pgd is deterministic in the seed") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  AttackSpec spec;
  spec.kind = AttackKind::pgd;
  spec.eps = 0.03;
  spec.pgd_steps = 5;
  spec.seed = 11;
  auto a = af::attacks::pgd(m, x, 0, spec);
  auto b = af::attacks::pgd(m, x, 0, spec);
  CHECK(a.adversarial == b.adversarial);
  spec.seed = 12;
  auto c = af::attacks::pgd(m, x, 0, spec);
  CHECK(a.adversarial != c.adversarial);
}

TEST_CASE("pgd explicit step size is honored and validated") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  AttackSpec spec;
  spec.kind = AttackKind::pgd;
  spec.eps = 0.0;
  spec.pgd_steps = 3;
  // Zero budget collapses the box onto x regardless of step size.
  auto res = af::attacks::pgd(m, x, 0, spec);
  CHECK(linf(res.adversarial, x) == 0.0);

  spec.pgd_steps = 0;
  CHECK_THROWS_AS(af::attacks::pgd(m, x, 0, spec), af::ParamError);
}

TEST_CASE("cw converges to the minimal-norm flip on a linear model") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  // Correctly classified as fake: Z1 > 0.
  double margin = m.logits(x)[1];
  REQUIRE(margin > 0.0);

  AttackSpec spec;
  spec.kind = AttackKind::cw;
  spec.cw_c = 10.0;
  spec.cw_kappa = 0.0;
  spec.cw_iters = 2000;
  spec.cw_lr = 0.005;

  auto res = af::attacks::carlini_wagner(m, x, af::nn::kClassFake, spec);
  double got = l2(res.adversarial, x);
  double want = margin / m.w_norm();
  CHECK(got == doctest::Approx(want).epsilon(0.05));
  // The flip actually happened.
  CHECK(m.logits(res.adversarial)[1] <= 1e-9);
}

TEST_CASE("cw with a confidence margin overshoots by kappa / |w|") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  double margin = m.logits(x)[1];

  AttackSpec spec;
  spec.kind = AttackKind::cw;
  spec.cw_c = 10.0;
  spec.cw_kappa = 0.5;
  spec.cw_iters = 2000;
  spec.cw_lr = 0.005;

  auto res = af::attacks::carlini_wagner(m, x, af::nn::kClassFake, spec);
  double want = (margin + spec.cw_kappa) / m.w_norm();
  CHECK(l2(res.adversarial, x) == doctest::Approx(want).epsilon(0.05));
  CHECK(m.logits(res.adversarial)[1] <= -spec.cw_kappa + 1e-6);
}

TEST_CASE("cw with zero trade-off constant never moves") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  AttackSpec spec;
  spec.kind = AttackKind::cw;
  spec.cw_c = 0.0;
  spec.cw_iters = 50;
  auto res = af::attacks::carlini_wagner(m, x, af::nn::kClassFake, spec);
  CHECK(res.adversarial == x);
}

TEST_CASE("cw returns the identity when the input is already misclassified") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  REQUIRE(m.logits(x)[1] > 0.0);  // predicted fake, so label real is misclassified
  AttackSpec spec;
  spec.kind = AttackKind::cw;
  spec.cw_iters = 100;
  auto res = af::attacks::carlini_wagner(m, x, af::nn::kClassReal, spec);
  CHECK(res.adversarial == x);
}

TEST_CASE("cw validates its parameters") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  AttackSpec spec;
  spec.kind = AttackKind::cw;
  spec.cw_c = -1.0;
  CHECK_THROWS_AS(af::attacks::carlini_wagner(m, x, 1, spec), af::ParamError);
  spec = {};
  spec.cw_iters = 0;
  CHECK_THROWS_AS(af::attacks::carlini_wagner(m, x, 1, spec), af::ParamError);
  spec = {};
  spec.cw_lr = 0.0;
  CHECK_THROWS_AS(af::attacks::carlini_wagner(m, x, 1, spec), af::ParamError);
}

TEST_CASE("deepfool crosses a linear boundary in one iteration") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  double margin = m.logits(x)[1];
  REQUIRE(margin > 0.0);

  AttackSpec spec;
  spec.kind = AttackKind::deepfool;
  spec.df_overshoot = 0.02;
  spec.df_max_iters = 50;

  auto res = af::attacks::deepfool(m, x, af::nn::kClassFake, spec);
  CHECK(res.iterations == 1);
  double want = (1.0 + spec.df_overshoot) * margin / m.w_norm();
  CHECK(l2(res.adversarial, x) == doctest::Approx(want).epsilon(1e-9));
  CHECK(m.logits(res.adversarial)[1] < 0.0);
}

TEST_CASE("deepfool distance scales with the overshoot") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  AttackSpec a;
  a.kind = AttackKind::deepfool;
  a.df_overshoot = 0.02;
  AttackSpec b = a;
  b.df_overshoot = 0.10;
  double da = l2(af::attacks::deepfool(m, x, 1, a).adversarial, x);
  double db = l2(af::attacks::deepfool(m, x, 1, b).adversarial, x);
  CHECK(db / da == doctest::Approx(1.10 / 1.02).epsilon(1e-9));
}

TEST_CASE("deepfool returns the identity when already misclassified") {
  LinearModel m = default_model();
  std::vector<double> x = default_x();
  auto res = af::attacks::deepfool(m, x, af::nn::kClassReal, {});
  CHECK(res.iterations == 0);
  CHECK(res.adversarial == x);
}

TEST_CASE("deepfool reports a degenerate gradient as a numeric error") {
  LinearModel m(std::vector<double>(8, 0.0), 0.5);  // Z1 constant: no boundary
  std::vector<double> x = default_x();
  AttackSpec spec;
  spec.kind = AttackKind::deepfool;
  CHECK_THROWS_AS(af::attacks::deepfool(m, x, af::nn::kClassFake, spec), af::NumericError);
}

TEST_CASE("apply_attack covers every kind and keeps clip identity") {
  LinearModel m = default_model();
  af::audio::AudioClip clip;
  clip.samples = default_x();
  clip.sample_rate = 16000;
  clip.id = "clip_7";

  for (AttackKind k : af::attacks::all_attack_kinds()) {
    AttackSpec spec;
    spec.kind = k;
    spec.eps = 0.01;
    spec.seed = 5;
    if (k == AttackKind::pitch_shift || k == AttackKind::median_filter) {
      // These need realistic audio lengths; covered separately.
      continue;
    }
    auto out = af::attacks::apply_attack(&m, clip, 1, spec);
    CHECK(out.id == clip.id);
    CHECK(out.sample_rate == clip.sample_rate);
    CHECK(out.len() == clip.len());
  }
}

TEST_CASE("apply_attack derives noise from the clip id") {
  af::audio::AudioClip a;
  a.samples.assign(256, 0.0);
  a.sample_rate = 16000;
  a.id = "one";
  af::audio::AudioClip b = a;
  b.id = "two";

  AttackSpec spec;
  spec.kind = AttackKind::noise_add;
  spec.sigma = 0.1;
  spec.seed = 9;
  auto oa = af::attacks::apply_attack(nullptr, a, 0, spec);
  auto ob = af::attacks::apply_attack(nullptr, b, 0, spec);
  auto oa2 = af::attacks::apply_attack(nullptr, a, 0, spec);
  CHECK(oa.samples == oa2.samples);
  CHECK(oa.samples != ob.samples);
}

TEST_CASE("apply_attack requires a model for gradient kinds") {
  af::audio::AudioClip clip;
  clip.samples = default_x();
  clip.sample_rate = 16000;
  clip.id = "x";
  AttackSpec spec;
  spec.kind = AttackKind::fgsm;
  CHECK_THROWS_AS(af::attacks::apply_attack(nullptr, clip, 0, spec), af::ParamError);
}

TEST_CASE("attack_batch matches elementwise application") {
  LinearModel m = default_model();
  std::vector<af::audio::AudioClip> clips;
  std::vector<int> labels;
  af::Rng rng(17);
  for (int i = 0; i < 6; ++i) {
    af::audio::AudioClip c;
    c.sample_rate = 16000;
    c.id = "b" + std::to_string(i);
    for (int j = 0; j < 8; ++j) c.samples.push_back(rng.uniform(-0.5, 0.5));
    clips.push_back(std::move(c));
    labels.push_back(i % 2);
  }
  AttackSpec spec;
  spec.kind = AttackKind::pgd;
  spec.eps = 0.05;
  spec.pgd_steps = 10;
  spec.seed = 21;

  auto batch = af::attacks::attack_batch(m, clips, labels, spec);
  REQUIRE(batch.size() == clips.size());
  for (size_t i = 0; i < clips.size(); ++i) {
    auto single = af::attacks::apply_attack(&m, clips[i], labels[i], spec);
    CHECK(batch[i].clip.samples == single.samples);
    CHECK(batch[i].error.empty());
  }
}

TEST_CASE("attack_batch records per-clip failures and continues") {
  LinearModel degenerate(std::vector<double>(8, 0.0), 0.5);  // deepfool cannot move
  std::vector<af::audio::AudioClip> clips(2);
  for (int i = 0; i < 2; ++i) {
    clips[i].samples = default_x();
    clips[i].sample_rate = 16000;
    clips[i].id = "c" + std::to_string(i);
  }
  // Constant Z1 = 0.5 > Z0 predicts fake; label fake means deepfool must run
  // and hit the zero gradient.
  std::vector<int> labels{1, 1};
  AttackSpec spec;
  spec.kind = AttackKind::deepfool;

  auto batch = af::attacks::attack_batch(degenerate, clips, labels, spec);
  REQUIRE(batch.size() == 2);
  for (const auto& item : batch) {
    CHECK_FALSE(item.error.empty());
    CHECK_FALSE(item.success);
    CHECK(item.clip.samples == default_x());  // input copy on failure
  }
}

TEST_CASE("attack_batch success means the prediction changed") {
  LinearModel m = default_model();
  std::vector<af::audio::AudioClip> clips(1);
  clips[0].samples = default_x();
  clips[0].sample_rate = 16000;
  clips[0].id = "s";
  REQUIRE(m.logits(clips[0].samples)[1] > 0.0);

  AttackSpec flip;
  flip.kind = AttackKind::deepfool;
  auto hit = af::attacks::attack_batch(m, clips, {1}, flip);
  CHECK(hit[0].success);

  AttackSpec noop;
  noop.kind = AttackKind::fgsm;
  noop.eps = 0.0;
  auto miss = af::attacks::attack_batch(m, clips, {1}, noop);
  CHECK_FALSE(miss[0].success);
}

TEST_CASE("attack_batch handles empty input") {
  LinearModel m = default_model();
  auto batch = af::attacks::attack_batch(m, {}, {}, {});
  CHECK(batch.empty());
  std::vector<af::audio::AudioClip> clips(1);
  clips[0].samples = default_x();
  CHECK_THROWS_AS(af::attacks::attack_batch(m, clips, {}, {}), af::DataError);
}

TEST_SUITE_END();
