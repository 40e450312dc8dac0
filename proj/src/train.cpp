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

#include "af/train.hpp"

#include <cmath>
#include <numeric>

#include "af/common.hpp"
#include "af/model.hpp"
#include "af/opt_attacks.hpp"
#include "af/rng.hpp"

namespace af::nn {

namespace {

void validate_inputs(const Detector& det, const std::vector<std::vector<double>>& waves,
                     const std::vector<int>& labels, const TrainConfig& cfg) {
  if (waves.empty()) throw DataError("train: empty dataset");
  if (waves.size() != labels.size()) throw DataError("train: waveform/label count mismatch");
  bool has[2] = {false, false};
  for (size_t i = 0; i < waves.size(); ++i) {
    if (waves[i].size() != det.input_len()) {
      throw DataError("train: clip " + std::to_string(i) + " length " +
                      std::to_string(waves[i].size()) + " != detector input " +
                      std::to_string(det.input_len()));
    }
    if (labels[i] != kClassReal && labels[i] != kClassFake) {
      throw DataError("train: bad label at clip " + std::to_string(i));
    }
    has[labels[i]] = true;
  }
  if (!has[0] || !has[1]) throw ParamError("train: training split needs both classes");
  if (cfg.epochs <= 0) throw ParamError("train: epochs must be positive");
  if (cfg.batch_size <= 0) throw ParamError("train: batch size must be positive");
  if (!(cfg.lr > 0.0)) throw ParamError("train: learning rate must be positive");
  if (cfg.weight_decay < 0.0) throw ParamError("train: negative weight decay");
}

}  // namespace

TrainResult train(Detector& det, const std::vector<std::vector<double>>& waves,
                  const std::vector<int>& labels, const TrainConfig& cfg,
                  const AdvCrafter* crafter) {
  validate_inputs(det, waves, labels, cfg);
  const size_t n = waves.size();

  // The front end has no parameters, so clean features are fixed for the run.
  std::vector<std::vector<double>> feats(n);
  for (size_t i = 0; i < n; ++i) feats[i] = det.features(waves[i]);

  std::vector<double> m(det.params.size(), 0.0);
  std::vector<double> v(det.params.size(), 0.0);
  std::vector<double> grad(det.params.size(), 0.0);

  Rng shuffle_rng(hash_combine(cfg.seed, "shuffle"));
  Rng defense_rng(hash_combine(cfg.seed, "defense"));

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});

  TrainResult res;
  NetState st;
  size_t t = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss_sum = 0.0;

    for (size_t start = 0; start < n; start += static_cast<size_t>(cfg.batch_size)) {
      size_t end = std::min(n, start + static_cast<size_t>(cfg.batch_size));
      size_t count = end - start;
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;

      for (size_t bi = start; bi < end; ++bi) {
        size_t i = order[bi];
        int label = labels[i];

        std::vector<double> crafted;
        const std::vector<double>* feat = &feats[i];
        if (crafter != nullptr && crafter->craft && defense_rng.uniform() < crafter->fraction) {
          uint64_t s = defense_rng.next_u64();
          crafted = det.features(crafter->craft(det, waves[i], label, s));
          feat = &crafted;
        }

        auto logits = det.net_forward(*feat, st);
        batch_loss += cross_entropy(logits, label, cfg.class_weights);
        auto upstream = cross_entropy_logit_grad(logits, label, cfg.class_weights);
        det.net_backward(st, upstream, &grad, nullptr);
      }

      double inv = 1.0 / static_cast<double>(count);
      ++t;
      double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
      double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
      for (size_t j = 0; j < det.params.size(); ++j) {
        double g = grad[j] * inv;
        m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
        v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
        double mh = m[j] / bc1;
        double vh = v[j] / bc2;
        det.params[j] -= cfg.lr * (mh / (std::sqrt(vh) + cfg.adam_eps) +
                                   cfg.weight_decay * det.params[j]);
      }
      epoch_loss_sum += batch_loss;
    }
    res.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(n));
  }
  res.steps = t;
  return res;
}

TrainResult adversarial_train(Detector& det, const std::vector<std::vector<double>>& waves,
                              const std::vector<int>& labels, const TrainConfig& cfg,
                              const attacks::AttackSpec& adv_spec, double adv_fraction) {
  if (!attacks::is_gradient_attack(adv_spec.kind)) {
    throw ParamError("adversarial training needs a gradient attack");
  }
  if (adv_fraction < 0.0 || adv_fraction > 1.0) {
    throw ParamError("adversarial fraction must lie in [0, 1]");
  }
  AdvCrafter crafter;
  crafter.fraction = adv_fraction;
  crafter.craft = [&adv_spec](const Detector& model, std::span<const double> wave, int label,
                              uint64_t seed) {
    attacks::AttackSpec s = adv_spec;
    s.seed = seed;
    return attacks::apply_gradient_attack(model, wave, label, s).adversarial;
  };
  TrainResult res = train(det, waves, labels, cfg, &crafter);
  det.defended = 1;
  return res;
}

AdvCrafter random_attack_crafter(std::vector<attacks::AttackKind> kinds, double fraction) {
  if (kinds.empty()) throw ParamError("random crafter needs at least one attack kind");
  if (fraction < 0.0 || fraction > 1.0) {
    throw ParamError("adversarial fraction must lie in [0, 1]");
  }
  AdvCrafter crafter;
  crafter.fraction = fraction;
  crafter.craft = [kinds = std::move(kinds)](const Detector& model, std::span<const double> wave,
                                             int label, uint64_t seed) {
    Rng rng(seed);
    attacks::AttackKind k = kinds[rng.below(kinds.size())];
    std::vector<attacks::AttackSpec> grid = attacks::grid_for(k);
    attacks::AttackSpec s = grid[rng.below(grid.size())];
    s.seed = rng.next_u64();

    audio::AudioClip clip;
    clip.samples.assign(wave.begin(), wave.end());
    clip.sample_rate = model.sample_rate;
    clip.id = "crafted";
    audio::AudioClip attacked;
    try {
      attacked = attacks::apply_attack(&model, clip, label, s);
    } catch (const NumericError&) {
      // Gradient attacks can stall on a half-trained model (dead relu path,
      // zero logit gradient). Train on the clean sample instead of aborting.
      return std::vector<double>(wave.begin(), wave.end());
    }
    if (attacked.len() != wave.size()) {
      attacked = audio::normalize_length(attacked, wave.size());
    }
    return std::move(attacked.samples);
  };
  return crafter;
}

}  // namespace af::nn
