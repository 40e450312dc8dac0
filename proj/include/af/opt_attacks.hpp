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

#include "af/attack_spec.hpp"
#include "af/audio.hpp"
#include "af/model.hpp"

namespace af::attacks {

struct GradAttackResult {
  std::vector<double> adversarial;
  int iterations = 0;
};

// Single sign step along the cross-entropy gradient for the true label;
// sign(0) contributes nothing. Output is not clamped to [-1, 1].
GradAttackResult fgsm(const nn::GradModel& m, std::span<const double> x, int label, double eps);

// Iterated sign steps from a random start inside the L-inf ball, projected
// back onto the ball after every step. Uses spec.eps, pgd_steps, pgd_alpha
// (non-positive alpha selects 2.5 * eps / steps) and spec.seed for the start.
GradAttackResult pgd(const nn::GradModel& m, std::span<const double> x, int label,
                     const AttackSpec& spec);

// Minimizes |delta|^2 + c * max(Z_label - Z_other, -kappa) with Adam from
// delta = 0. Returns the smallest-norm iterate whose margin reached -kappa,
// else the final iterate.
GradAttackResult carlini_wagner(const nn::GradModel& m, std::span<const double> x, int label,
                                const AttackSpec& spec);

// Linearized boundary walk. Returns the input unchanged when the prediction
// already differs from the label; otherwise the candidate tested each round
// is x + (1 + overshoot) * accumulated step. Throws NumericError when the
// logit-difference gradient vanishes.
GradAttackResult deepfool(const nn::GradModel& m, std::span<const double> x, int label,
                          const AttackSpec& spec);

// Dispatch on spec.kind (gradient kinds only).
GradAttackResult apply_gradient_attack(const nn::GradModel& m, std::span<const double> x,
                                       int label, const AttackSpec& spec);

// Any attack kind applied to one clip. Per-clip randomness is derived as
// hash(spec.seed, clip.id) so batch and single-clip calls agree. `model` may
// be null for the statistical kinds.
audio::AudioClip apply_attack(const nn::GradModel* model, const audio::AudioClip& clip,
                              int label, const AttackSpec& spec);

struct BatchItem {
  audio::AudioClip clip;   // attacked audio (input copy when the attack errored)
  bool success = false;    // predicted class changed versus the clean clip
  std::string error;       // nonempty when the attack failed for this clip
};

// Order-preserving sweep over a batch; per-clip failures are recorded and the
// batch continues.
std::vector<BatchItem> attack_batch(const nn::GradModel& model,
                                    const std::vector<audio::AudioClip>& clips,
                                    const std::vector<int>& labels, const AttackSpec& spec);

}  // namespace af::attacks
