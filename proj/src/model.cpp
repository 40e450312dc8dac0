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

#include "af/model.hpp"

#include <cmath>

#include "af/common.hpp"

namespace af::nn {

std::array<double, 2> softmax2(std::array<double, 2> z) {
  double m = std::max(z[0], z[1]);
  double e0 = std::exp(z[0] - m);
  double e1 = std::exp(z[1] - m);
  double s = e0 + e1;
  return {e0 / s, e1 / s};
}

double fake_score(std::array<double, 2> z) { return softmax2(z)[1]; }

double cross_entropy(std::array<double, 2> z, int label, std::array<double, 2> cw) {
  if (label != 0 && label != 1) throw ParamError("cross_entropy: label must be 0 or 1");
  double m = std::max(z[0], z[1]);
  double lse = m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
  return cw[static_cast<size_t>(label)] * (lse - z[static_cast<size_t>(label)]);
}

std::array<double, 2> cross_entropy_logit_grad(std::array<double, 2> z, int label,
                                               std::array<double, 2> cw) {
  if (label != 0 && label != 1) throw ParamError("cross_entropy: label must be 0 or 1");
  std::array<double, 2> p = softmax2(z);
  double w = cw[static_cast<size_t>(label)];
  std::array<double, 2> g = {w * p[0], w * p[1]};
  g[static_cast<size_t>(label)] -= w;
  return g;
}

double loss_and_input_grad(const GradModel& m, std::span<const double> x, int label,
                           std::vector<double>& grad, std::array<double, 2> cw) {
  std::array<double, 2> z = m.logits(x);
  grad = m.logit_grad(x, cross_entropy_logit_grad(z, label, cw));
  return cross_entropy(z, label, cw);
}

}  // namespace af::nn
