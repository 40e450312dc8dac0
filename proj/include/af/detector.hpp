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
#include <string>
#include <vector>

#include "af/model.hpp"
#include "af/stft.hpp"

namespace af::nn {

enum class DetectorKind : uint8_t { raw = 0, spectrogram = 1 };

const char* to_string(DetectorKind k);
DetectorKind detector_kind_from_string(const std::string& s);

enum class LayerKind : uint8_t {
  conv1d = 0,
  conv2d = 1,
  relu = 2,
  mean_pool2d = 3,
  global_mean_pool = 4,
  dense = 5,
};

struct LayerDesc {
  LayerKind kind = LayerKind::relu;
  int in_ch = 0, out_ch = 0;
  int kernel = 0, stride = 1;  // conv1d/conv2d (conv2d is square, stride 1)
  int pool = 0;                // mean_pool2d window
  int in_dim = 0, out_dim = 0; // dense
};

// Tensors are flat doubles with a (channels, height, width) shape; 1-d data
// uses height == 1.
struct Shape {
  int c = 0, h = 0, w = 0;
  size_t count() const {
    return static_cast<size_t>(c) * static_cast<size_t>(h) * static_cast<size_t>(w);
  }
};

struct ParamSlice {
  std::string name;
  size_t offset = 0;
  size_t size = 0;
};

// Per-forward activation storage reused by the backward pass.
struct NetState {
  std::vector<std::vector<double>> act;  // act[0] is the input tensor
  std::vector<Shape> shapes;
};

class Detector : public GradModel {
 public:
  DetectorKind kind = DetectorKind::raw;
  int input_samples = 16000;
  int sample_rate = 16000;
  audio::StftConfig front;  // spectrogram kind only
  std::vector<LayerDesc> layers;
  std::vector<double> params;
  std::vector<ParamSlice> slices;
  uint64_t init_seed = 0;
  uint8_t defended = 0;

  // --- GradModel ---
  size_t input_len() const override { return static_cast<size_t>(input_samples); }
  std::array<double, 2> logits(std::span<const double> x) const override;
  std::vector<double> logit_grad(std::span<const double> x,
                                 std::array<double, 2> w) const override;

  // --- feature-level interface (training caches features) ---
  Shape feature_shape() const;
  std::vector<double> features(std::span<const double> x) const;
  std::array<double, 2> net_forward(std::span<const double> feat, NetState& st) const;
  // upstream = dJ/dlogits. Accumulates into param_grad (size params.size())
  // and/or writes the feature gradient.
  void net_backward(const NetState& st, std::array<double, 2> upstream,
                    std::vector<double>* param_grad, std::vector<double>* feat_grad) const;

  // Waveform gradient given a feature gradient (identity for raw kind).
  std::vector<double> input_grad_from_features(std::span<const double> x,
                                               const std::vector<double>& feat_grad) const;

  size_t param_count() const { return params.size(); }
  // FNV hash of the parameter bytes; identifies a trained model in cache keys.
  std::string param_fingerprint() const;
};

// Reference architectures. Parameters are drawn U(-1/sqrt(fan_in),
// 1/sqrt(fan_in)) from the seed; biases start at zero.
Detector make_raw_tiny(int input_samples, uint64_t seed, int sample_rate = 16000);
Detector make_spec_tiny(int input_samples, uint64_t seed, int sample_rate = 16000,
                        const audio::StftConfig& front = {});

// Versioned binary container; round-trips parameters bit-exactly.
void save_checkpoint(const std::string& path, const Detector& det);
Detector load_checkpoint(const std::string& path);

}  // namespace af::nn
