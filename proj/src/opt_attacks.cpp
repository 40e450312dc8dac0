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

#include "af/opt_attacks.hpp"

#include <cmath>
#include <limits>

#include "af/common.hpp"
#include "af/kernels.hpp"
#include "af/rng.hpp"
#include "af/stats_attacks.hpp"

namespace af::attacks {

namespace {

int predicted(std::array<double, 2> z) { return z[1] > z[0] ? nn::kClassFake : nn::kClassReal; }

void check_input(const nn::GradModel& m, std::span<const double> x, const char* who) {
  if (x.size() != m.input_len()) {
    throw ShapeError(std::string(who) + ": input length " + std::to_string(x.size()) +
                     " != model input " + std::to_string(m.input_len()));
  }
}

void check_label(int label, const char* who) {
  if (label != nn::kClassReal && label != nn::kClassFake) {
    throw ParamError(std::string(who) + ": label must be 0 or 1");
  }
}

}  // namespace

GradAttackResult fgsm(const nn::GradModel& m, std::span<const double> x, int label, double eps) {
  if (eps < 0.0 || !std::isfinite(eps)) throw ParamError("fgsm: epsilon must be >= 0");
  check_input(m, x, "fgsm");
  check_label(label, "fgsm");

  std::vector<double> grad;
  nn::loss_and_input_grad(m, x, label, grad);

  GradAttackResult res;
  res.adversarial.resize(x.size());
  kernels::sign_step(x.data(), grad.data(), eps, res.adversarial.data(), x.size());
  res.iterations = 1;
  return res;
}

GradAttackResult pgd(const nn::GradModel& m, std::span<const double> x, int label,
                     const AttackSpec& spec) {
  double eps = spec.eps;
  int steps = spec.pgd_steps;
  if (eps < 0.0 || !std::isfinite(eps)) throw ParamError("pgd: epsilon must be >= 0");
  if (steps < 1) throw ParamError("pgd: steps must be >= 1");
  check_input(m, x, "pgd");
  check_label(label, "pgd");
  double alpha = spec.pgd_alpha > 0.0 ? spec.pgd_alpha
                                      : 2.5 * eps / static_cast<double>(steps);

  GradAttackResult res;
  res.adversarial.assign(x.begin(), x.end());
  Rng rng(spec.seed);
  for (double& s : res.adversarial) s += rng.uniform(-eps, eps);

  std::vector<double> grad;
  for (int t = 0; t < steps; ++t) {
    nn::loss_and_input_grad(m, res.adversarial, label, grad);
    kernels::sign_step(res.adversarial.data(), grad.data(), alpha, res.adversarial.data(),
                       x.size());
    kernels::clamp_box(x.data(), eps, res.adversarial.data(), x.size());
  }
  res.iterations = steps;
  return res;
}

GradAttackResult carlini_wagner(const nn::GradModel& m, std::span<const double> x, int label,
                                const AttackSpec& spec) {
  if (spec.cw_c < 0.0) throw ParamError("cw: trade-off constant must be >= 0");
  if (spec.cw_iters < 1) throw ParamError("cw: iteration budget must be >= 1");
  if (!(spec.cw_lr > 0.0)) throw ParamError("cw: learning rate must be positive");
  check_input(m, x, "cw");
  check_label(label, "cw");

  const size_t n = x.size();
  const int other = 1 - label;
  const std::array<double, 2> margin_w =
      label == 0 ? std::array<double, 2>{1.0, -1.0} : std::array<double, 2>{-1.0, 1.0};

  std::vector<double> delta(n, 0.0);
  std::vector<double> adv(n);
  std::vector<double> m1(n, 0.0), m2(n, 0.0), grad(n);
  std::vector<double> best;
  double best_l2 = std::numeric_limits<double>::infinity();

  // Adam on the unconstrained objective; every iterate is a success candidate.
  for (int it = 0;; ++it) {
    kernels::vadd(x.data(), delta.data(), adv.data(), n);
    std::array<double, 2> z = m.logits(adv);
    double margin = z[label] - z[other];
    if (margin <= -spec.cw_kappa) {
      double l2 = std::sqrt(kernels::sumsq(delta.data(), n));
      if (l2 < best_l2) {
        best_l2 = l2;
        best = delta;
      }
    }
    if (it == spec.cw_iters) break;

    for (size_t i = 0; i < n; ++i) grad[i] = 2.0 * delta[i];
    if (margin > -spec.cw_kappa && spec.cw_c > 0.0) {
      std::vector<double> mg = m.logit_grad(adv, margin_w);
      kernels::axpy(spec.cw_c, mg.data(), grad.data(), n);
    }

    double t = static_cast<double>(it + 1);
    double bc1 = 1.0 - std::pow(0.9, t);
    double bc2 = 1.0 - std::pow(0.999, t);
    for (size_t i = 0; i < n; ++i) {
      m1[i] = 0.9 * m1[i] + 0.1 * grad[i];
      m2[i] = 0.999 * m2[i] + 0.001 * grad[i] * grad[i];
      delta[i] -= spec.cw_lr * (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + 1e-8);
    }
  }

  GradAttackResult res;
  const std::vector<double>& chosen = best.empty() ? delta : best;
  res.adversarial.resize(n);
  kernels::vadd(x.data(), chosen.data(), res.adversarial.data(), n);
  res.iterations = spec.cw_iters;
  return res;
}

GradAttackResult deepfool(const nn::GradModel& m, std::span<const double> x, int label,
                          const AttackSpec& spec) {
  if (spec.df_max_iters < 1) throw ParamError("deepfool: max iterations must be >= 1");
  if (spec.df_overshoot < 0.0) throw ParamError("deepfool: overshoot must be >= 0");
  check_input(m, x, "deepfool");
  check_label(label, "deepfool");

  GradAttackResult res;
  res.adversarial.assign(x.begin(), x.end());

  std::array<double, 2> z = m.logits(x);
  if (predicted(z) != label) return res;  // nothing to flip

  const size_t n = x.size();
  const int k = label;
  const int other = 1 - k;
  const std::array<double, 2> diff_w =
      k == 0 ? std::array<double, 2>{1.0, -1.0} : std::array<double, 2>{-1.0, 1.0};
  const double scale = 1.0 + spec.df_overshoot;

  std::vector<double> r_total(n, 0.0);
  int it = 0;
  while (it < spec.df_max_iters) {
    double diff = z[k] - z[other];
    std::vector<double> g = m.logit_grad(res.adversarial, diff_w);
    double gn2 = kernels::sumsq(g.data(), n);
    if (std::sqrt(gn2) < 1e-12) {
      throw NumericError("deepfool: degenerate logit-difference gradient");
    }
    kernels::axpy(-diff / gn2, g.data(), r_total.data(), n);
    ++it;

    for (size_t i = 0; i < n; ++i) res.adversarial[i] = x[i] + scale * r_total[i];
    z = m.logits(res.adversarial);
    if (predicted(z) != k) break;
  }
  res.iterations = it;
  return res;
}

GradAttackResult apply_gradient_attack(const nn::GradModel& m, std::span<const double> x,
                                       int label, const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::fgsm:
      return fgsm(m, x, label, spec.eps);
    case AttackKind::pgd:
      return pgd(m, x, label, spec);
    case AttackKind::cw:
      return carlini_wagner(m, x, label, spec);
    case AttackKind::deepfool:
      return deepfool(m, x, label, spec);
    default:
      throw ParamError("apply_gradient_attack: '" + std::string(to_string(spec.kind)) +
                       "' is not a gradient attack");
  }
}

audio::AudioClip apply_attack(const nn::GradModel* model, const audio::AudioClip& clip,
                              int label, const AttackSpec& spec) {
  AttackSpec s = spec;
  s.seed = hash_combine(spec.seed, clip.id);
  switch (s.kind) {
    case AttackKind::pitch_shift:
      return pitch_shift(clip, s.semitones);
    case AttackKind::median_filter:
      return median_filter(clip, s.kernel);
    case AttackKind::noise_add:
      return noise_add(clip, s.sigma, s.seed);
    case AttackKind::quantize:
      return quantize(clip, s.bits);
    default:
      break;
  }
  if (model == nullptr) throw ParamError("gradient attacks need a trained detector");
  GradAttackResult r = apply_gradient_attack(*model, clip.samples, label, s);
  audio::AudioClip out;
  out.samples = std::move(r.adversarial);
  out.sample_rate = clip.sample_rate;
  out.id = clip.id;
  return out;
}

std::vector<BatchItem> attack_batch(const nn::GradModel& model,
                                    const std::vector<audio::AudioClip>& clips,
                                    const std::vector<int>& labels, const AttackSpec& spec) {
  if (clips.size() != labels.size()) {
    throw DataError("attack_batch: clip/label count mismatch");
  }
  std::vector<BatchItem> out;
  out.reserve(clips.size());
  for (size_t i = 0; i < clips.size(); ++i) {
    BatchItem item;
    try {
      int clean = predicted(model.logits(clips[i].samples));
      item.clip = apply_attack(&model, clips[i], labels[i], spec);
      item.success = predicted(model.logits(item.clip.samples)) != clean;
    } catch (const Error& e) {
      item.clip = clips[i];
      item.success = false;
      item.error = e.what();
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace af::attacks
