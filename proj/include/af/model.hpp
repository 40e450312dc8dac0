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
#include <span>
#include <vector>

namespace af::nn {

// Class index convention everywhere: 0 = real, 1 = fake.
constexpr int kClassReal = 0;
constexpr int kClassFake = 1;

// Differentiable binary detector over fixed-length waveforms. Gradient-based
// attacks are written against this contract; the reference detectors and the
// closed-form linear models in the tests both implement it.
class GradModel {
 public:
  virtual ~GradModel() = default;

  virtual size_t input_len() const = 0;
  virtual std::array<double, 2> logits(std::span<const double> x) const = 0;
  // Gradient of w[0]*Z0(x) + w[1]*Z1(x) with respect to x.
  virtual std::vector<double> logit_grad(std::span<const double> x,
                                         std::array<double, 2> w) const = 0;
};

std::array<double, 2> softmax2(std::array<double, 2> z);
double fake_score(std::array<double, 2> z);  // softmax probability of class 1

// Class-weighted cross entropy on a 2-way softmax.
double cross_entropy(std::array<double, 2> z, int label,
                     std::array<double, 2> class_weights = {1.0, 1.0});
// dJ/dZ for the loss above.
std::array<double, 2> cross_entropy_logit_grad(std::array<double, 2> z, int label,
                                               std::array<double, 2> class_weights = {1.0,
                                                                                      1.0});

// Loss plus its waveform gradient through any GradModel.
double loss_and_input_grad(const GradModel& m, std::span<const double> x, int label,
                           std::vector<double>& grad,
                           std::array<double, 2> class_weights = {1.0, 1.0});

}  // namespace af::nn
