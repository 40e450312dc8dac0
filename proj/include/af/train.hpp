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

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "af/attack_spec.hpp"
#include "af/detector.hpp"

namespace af::nn {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 64;
  double lr = 1e-4;
  double weight_decay = 1e-4;  // decoupled, applied outside the Adam moment update
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;
  std::array<double, 2> class_weights{1.0, 1.0};
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean weighted cross entropy per epoch
  size_t steps = 0;                // optimizer updates performed
};

// Replaces selected training examples before the gradient step. Receives the
// live detector so crafted examples track the current parameters.
struct AdvCrafter {
  double fraction = 0.5;  // probability an example is replaced
  std::function<std::vector<double>(const Detector&, std::span<const double> wave, int label,
                                    uint64_t seed)>
      craft;
};

// Minibatch Adam on the detector parameters. Waveforms must already match
// det.input_len(). Clean features are computed once up front; augmented
// examples are re-featurized on the fly.
TrainResult train(Detector& det, const std::vector<std::vector<double>>& waves,
                  const std::vector<int>& labels, const TrainConfig& cfg,
                  const AdvCrafter* crafter = nullptr);

// Adversarial training: mixes per-example perturbations crafted with the
// given gradient attack into every batch.
TrainResult adversarial_train(Detector& det, const std::vector<std::vector<double>>& waves,
                              const std::vector<int>& labels, const TrainConfig& cfg,
                              const attacks::AttackSpec& adv_spec, double adv_fraction = 0.5);

// Crafter that draws a kind uniformly from `kinds` and a parameter setting
// uniformly from that kind's sweep grid, per crafted example.
AdvCrafter random_attack_crafter(std::vector<attacks::AttackKind> kinds, double fraction = 0.5);

}  // namespace af::nn
