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

#include "af/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "af/common.hpp"
#include "af/kernels.hpp"
#include "af/model.hpp"

namespace af::metrics {

namespace {

struct ClassCounts {
  long long fakes = 0;
  long long reals = 0;
};

ClassCounts check_scored_set(std::span<const double> scores, std::span<const int> labels,
                             bool need_both) {
  if (scores.size() != labels.size()) throw ShapeError("metrics: score/label count mismatch");
  if (scores.empty()) throw DataError("metrics: empty scored set");
  ClassCounts c;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw NumericError("metrics: non-finite score at index " + std::to_string(i));
    }
    if (labels[i] == nn::kClassFake) {
      ++c.fakes;
    } else if (labels[i] == nn::kClassReal) {
      ++c.reals;
    } else {
      throw DataError("metrics: bad label at index " + std::to_string(i));
    }
  }
  if (need_both && (c.fakes == 0 || c.reals == 0)) {
    throw NumericError("metrics: both classes required");
  }
  return c;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  ClassCounts c = check_scored_set(scores, labels, true);
  const size_t n = scores.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum stays integral across tie groups, so the pairwise
  // count is reproduced exactly.
  long long fake_rank2 = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    long long rank2 = static_cast<long long>(i + 1) + static_cast<long long>(j);  // 2 * avg
    for (size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == nn::kClassFake) fake_rank2 += rank2;
    }
    i = j;
  }
  long long u2 = fake_rank2 - c.fakes * (c.fakes + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(c.fakes) *
                                    static_cast<double>(c.reals));
}

double eer(std::span<const double> scores, std::span<const int> labels) {
  ClassCounts c = check_scored_set(scores, labels, true);
  const size_t n = scores.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  // Operating points for "predict fake when score >= t", t descending through
  // the distinct scores. FPR rises 0 -> 1 while FNR falls 1 -> 0.
  double inv_r = 1.0 / static_cast<double>(c.reals);
  double inv_f = 1.0 / static_cast<double>(c.fakes);
  double prev_fpr = 0.0, prev_fnr = 1.0;
  long long fp = 0, tp = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    for (size_t k = i; k < j; ++k) {
      if (labels[idx[k]] == nn::kClassFake) {
        ++tp;
      } else {
        ++fp;
      }
    }
    i = j;
    double fpr = static_cast<double>(fp) * inv_r;
    double fnr = 1.0 - static_cast<double>(tp) * inv_f;
    double d = fpr - fnr;
    if (d >= 0.0) {
      if (d == 0.0) return fpr;
      double dprev = prev_fpr - prev_fnr;  // < 0 here
      double u = -dprev / (d - dprev);
      double fpr_x = prev_fpr + u * (fpr - prev_fpr);
      double fnr_x = prev_fnr + u * (fnr - prev_fnr);
      return 0.5 * (fpr_x + fnr_x);
    }
    prev_fpr = fpr;
    prev_fnr = fnr;
  }
  // Unreachable: the final operating point has FPR = 1, FNR = 0.
  throw NumericError("eer: sweep found no crossing");
}

Confusion confusion(std::span<const double> scores, std::span<const int> labels,
                    double threshold) {
  check_scored_set(scores, labels, false);
  Confusion m;
  for (size_t i = 0; i < scores.size(); ++i) {
    bool pred_fake = scores[i] >= threshold;
    if (labels[i] == nn::kClassFake) {
      pred_fake ? ++m.tp : ++m.fn;
    } else {
      pred_fake ? ++m.fp : ++m.tn;
    }
  }
  return m;
}

double accuracy(const Confusion& c) {
  long long total = c.total();
  if (total == 0) throw DataError("accuracy: empty confusion matrix");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("mse: length mismatch");
  if (a.empty()) throw DataError("mse: empty input");
  return kernels::sqdiff_sum(a.data(), b.data(), a.size()) / static_cast<double>(a.size());
}

QualityPair make_quality_pair(const audio::AudioClip& original,
                              const audio::AudioClip& attacked,
                              const audio::StftConfig& cfg) {
  if (original.len() != attacked.len()) throw ShapeError("quality pair: length mismatch");
  if (original.sample_rate != attacked.sample_rate) {
    throw ShapeError("quality pair: sample rate mismatch");
  }

  QualityPair p;
  p.waveform_mse = mse(original.samples, attacked.samples);
  p.original_view = audio::logmel(original, cfg);
  p.attacked_view = audio::logmel(attacked, cfg);

  auto [mn_it, mx_it] =
      std::minmax_element(p.original_view.v.begin(), p.original_view.v.end());
  double mn = *mn_it;
  double range = *mx_it - mn;
  if (range <= 0.0) range = 1.0;  // constant grid, keep differences in log units
  double inv = 1.0 / range;
  for (double& x : p.original_view.v) x = (x - mn) * inv;
  for (double& x : p.attacked_view.v) x = (x - mn) * inv;
  return p;
}

double spec_mse(const QualityPair& p) {
  return mse(p.original_view.v, p.attacked_view.v);
}

double ssim(const QualityPair& p) {
  const audio::Spectrogram& a = p.original_view;
  const audio::Spectrogram& b = p.attacked_view;
  if (a.frames != b.frames || a.bins != b.bins) throw ShapeError("ssim: grid shape mismatch");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  if (a.frames < kWin || a.bins < kWin) throw ShapeError("ssim: grid smaller than 11x11");

  double w[kWin][kWin];
  double wsum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    for (int j = 0; j < kWin; ++j) {
      double di = i - (kWin - 1) / 2.0;
      double dj = j - (kWin - 1) / 2.0;
      w[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
      wsum += w[i][j];
    }
  }
  for (auto& row : w) {
    for (double& x : row) x /= wsum;
  }

  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  const size_t rows = a.frames, cols = a.bins;
  double acc = 0.0;
  size_t count = 0;
  for (size_t y = 0; y + kWin <= rows; ++y) {
    for (size_t x = 0; x + kWin <= cols; ++x) {
      double mx = 0.0, my = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
      for (int i = 0; i < kWin; ++i) {
        const double* ra = &a.v[(y + i) * cols + x];
        const double* rb = &b.v[(y + i) * cols + x];
        for (int j = 0; j < kWin; ++j) {
          double wv = w[i][j];
          mx += wv * ra[j];
          my += wv * rb[j];
          xx += wv * ra[j] * ra[j];
          yy += wv * rb[j] * rb[j];
          xy += wv * ra[j] * rb[j];
        }
      }
      double vx = xx - mx * mx;
      double vy = yy - my * my;
      double cxy = xy - mx * my;
      double num = (2.0 * mx * my + kC1) * (2.0 * cxy + kC2);
      double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
      acc += num / den;
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace af::metrics
