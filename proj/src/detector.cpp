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

#include "af/detector.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "af/common.hpp"
#include "af/kernels.hpp"
#include "af/rng.hpp"

namespace af::nn {

namespace {

size_t weight_count(const LayerDesc& l) {
  switch (l.kind) {
    case LayerKind::conv1d:
      return static_cast<size_t>(l.out_ch) * l.in_ch * l.kernel + l.out_ch;
    case LayerKind::conv2d:
      return static_cast<size_t>(l.out_ch) * l.in_ch * l.kernel * l.kernel + l.out_ch;
    case LayerKind::dense:
      return static_cast<size_t>(l.out_dim) * l.in_dim + l.out_dim;
    default:
      return 0;
  }
}

int fan_in(const LayerDesc& l) {
  switch (l.kind) {
    case LayerKind::conv1d: return l.in_ch * l.kernel;
    case LayerKind::conv2d: return l.in_ch * l.kernel * l.kernel;
    case LayerKind::dense: return l.in_dim;
    default: return 0;
  }
}

Shape output_shape(const LayerDesc& l, const Shape& in) {
  switch (l.kind) {
    case LayerKind::conv1d: {
      if (in.c != l.in_ch || in.h != 1) throw ShapeError("conv1d: input shape mismatch");
      if (in.w < l.kernel) throw ShapeError("conv1d: input shorter than kernel");
      int out_w = (in.w - l.kernel) / l.stride + 1;
      return {l.out_ch, 1, out_w};
    }
    case LayerKind::conv2d: {
      if (in.c != l.in_ch) throw ShapeError("conv2d: input channels mismatch");
      if (in.h < l.kernel || in.w < l.kernel) throw ShapeError("conv2d: input too small");
      return {l.out_ch, in.h - l.kernel + 1, in.w - l.kernel + 1};
    }
    case LayerKind::relu:
      return in;
    case LayerKind::mean_pool2d: {
      if (in.h < l.pool || in.w < l.pool) throw ShapeError("mean_pool2d: input too small");
      return {in.c, in.h / l.pool, in.w / l.pool};
    }
    case LayerKind::global_mean_pool:
      return {in.c, 1, 1};
    case LayerKind::dense: {
      if (static_cast<int>(in.count()) != l.in_dim) throw ShapeError("dense: input mismatch");
      return {l.out_dim, 1, 1};
    }
  }
  throw ShapeError("unknown layer kind");
}

const char* layer_name(LayerKind k) {
  switch (k) {
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::relu: return "relu";
    case LayerKind::mean_pool2d: return "mean_pool2d";
    case LayerKind::global_mean_pool: return "global_mean_pool";
    case LayerKind::dense: return "dense";
  }
  return "?";
}

void check_finite(const std::vector<double>& v, size_t layer_idx, LayerKind kind) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw NumericError("non-finite activation after layer " + std::to_string(layer_idx) +
                         " (" + layer_name(kind) + ")");
    }
  }
}

void conv1d_fwd(const LayerDesc& l, const double* w, const double* in, const Shape& si,
                double* out, const Shape& so) {
  const double* bias = w + static_cast<size_t>(l.out_ch) * l.in_ch * l.kernel;
  size_t in_row = static_cast<size_t>(si.w);
  size_t k = static_cast<size_t>(l.kernel);
  for (int oc = 0; oc < l.out_ch; ++oc) {
    double* orow = out + static_cast<size_t>(oc) * so.w;
    for (int t = 0; t < so.w; ++t) {
      double acc = bias[oc];
      size_t base = static_cast<size_t>(t) * l.stride;
      const double* wrow = w + (static_cast<size_t>(oc) * l.in_ch) * k;
      for (int ic = 0; ic < l.in_ch; ++ic) {
        acc += kernels::dot(wrow + static_cast<size_t>(ic) * k, in + ic * in_row + base, k);
      }
      orow[t] = acc;
    }
  }
}

void conv1d_bwd(const LayerDesc& l, const double* w, const double* in, const Shape& si,
                const double* gout, const Shape& so, double* gw, double* gin) {
  size_t in_row = static_cast<size_t>(si.w);
  size_t k = static_cast<size_t>(l.kernel);
  double* gbias = gw != nullptr ? gw + static_cast<size_t>(l.out_ch) * l.in_ch * l.kernel
                                : nullptr;
  for (int oc = 0; oc < l.out_ch; ++oc) {
    const double* grow = gout + static_cast<size_t>(oc) * so.w;
    for (int t = 0; t < so.w; ++t) {
      double g = grow[t];
      if (g == 0.0) continue;
      size_t base = static_cast<size_t>(t) * l.stride;
      for (int ic = 0; ic < l.in_ch; ++ic) {
        size_t woff = (static_cast<size_t>(oc) * l.in_ch + ic) * k;
        if (gw != nullptr) kernels::axpy(g, in + ic * in_row + base, gw + woff, k);
        if (gin != nullptr) kernels::axpy(g, w + woff, gin + ic * in_row + base, k);
      }
      if (gbias != nullptr) gbias[oc] += g;
    }
  }
}

void conv2d_fwd(const LayerDesc& l, const double* w, const double* in, const Shape& si,
                double* out, const Shape& so) {
  size_t k = static_cast<size_t>(l.kernel);
  const double* bias = w + static_cast<size_t>(l.out_ch) * l.in_ch * k * k;
  size_t in_plane = static_cast<size_t>(si.h) * si.w;
  size_t out_plane = static_cast<size_t>(so.h) * so.w;
  for (int oc = 0; oc < l.out_ch; ++oc) {
    double* oplane = out + static_cast<size_t>(oc) * out_plane;
    for (int y = 0; y < so.h; ++y) {
      for (int x = 0; x < so.w; ++x) {
        double acc = bias[oc];
        for (int ic = 0; ic < l.in_ch; ++ic) {
          const double* iplane = in + static_cast<size_t>(ic) * in_plane;
          const double* wrow = w + ((static_cast<size_t>(oc) * l.in_ch + ic) * k) * k;
          for (size_t ky = 0; ky < k; ++ky) {
            acc += kernels::dot(wrow + ky * k, iplane + (y + ky) * si.w + x, k);
          }
        }
        oplane[static_cast<size_t>(y) * so.w + x] = acc;
      }
    }
  }
}

void conv2d_bwd(const LayerDesc& l, const double* w, const double* in, const Shape& si,
                const double* gout, const Shape& so, double* gw, double* gin) {
  size_t k = static_cast<size_t>(l.kernel);
  size_t in_plane = static_cast<size_t>(si.h) * si.w;
  size_t out_plane = static_cast<size_t>(so.h) * so.w;
  double* gbias = gw != nullptr ? gw + static_cast<size_t>(l.out_ch) * l.in_ch * k * k : nullptr;
  for (int oc = 0; oc < l.out_ch; ++oc) {
    const double* gplane = gout + static_cast<size_t>(oc) * out_plane;
    for (int y = 0; y < so.h; ++y) {
      for (int x = 0; x < so.w; ++x) {
        double g = gplane[static_cast<size_t>(y) * so.w + x];
        if (g == 0.0) continue;
        for (int ic = 0; ic < l.in_ch; ++ic) {
          const double* iplane = in + static_cast<size_t>(ic) * in_plane;
          double* giplane = gin != nullptr ? gin + static_cast<size_t>(ic) * in_plane : nullptr;
          size_t woff = ((static_cast<size_t>(oc) * l.in_ch + ic) * k) * k;
          for (size_t ky = 0; ky < k; ++ky) {
            if (gw != nullptr) {
              kernels::axpy(g, iplane + (y + ky) * si.w + x, gw + woff + ky * k, k);
            }
            if (giplane != nullptr) {
              kernels::axpy(g, w + woff + ky * k, giplane + (y + ky) * si.w + x, k);
            }
          }
        }
        if (gbias != nullptr) gbias[oc] += g;
      }
    }
  }
}

}  // namespace

const char* to_string(DetectorKind k) {
  return k == DetectorKind::raw ? "raw" : "spec";
}

DetectorKind detector_kind_from_string(const std::string& s) {
  if (s == "raw") return DetectorKind::raw;
  if (s == "spec" || s == "spectrogram") return DetectorKind::spectrogram;
  throw ParamError("unknown detector kind '" + s + "' (expected raw or spec)");
}

Shape Detector::feature_shape() const {
  if (kind == DetectorKind::raw) return {1, 1, input_samples};
  size_t frames = audio::frame_count(static_cast<size_t>(input_samples), front);
  return {1, static_cast<int>(frames), front.mel_bins};
}

std::vector<double> Detector::features(std::span<const double> x) const {
  if (x.size() != input_len()) throw ShapeError("detector: input length mismatch");
  if (kind == DetectorKind::raw) return std::vector<double>(x.begin(), x.end());
  audio::AudioClip clip;
  clip.samples.assign(x.begin(), x.end());
  clip.sample_rate = sample_rate;
  clip.id = "fwd";
  audio::Spectrogram sg = audio::logmel(clip, front);
  return sg.v;
}

std::array<double, 2> Detector::net_forward(std::span<const double> feat, NetState& st) const {
  Shape in_shape = feature_shape();
  if (feat.size() != in_shape.count()) throw ShapeError("detector: feature size mismatch");

  st.act.assign(layers.size() + 1, {});
  st.shapes.assign(layers.size() + 1, {});
  st.act[0].assign(feat.begin(), feat.end());
  st.shapes[0] = in_shape;

  size_t off = 0;
  for (size_t i = 0; i < layers.size(); ++i) {
    const LayerDesc& l = layers[i];
    const Shape& si = st.shapes[i];
    Shape so = output_shape(l, si);
    st.shapes[i + 1] = so;
    st.act[i + 1].assign(so.count(), 0.0);
    const double* in = st.act[i].data();
    double* out = st.act[i + 1].data();
    const double* w = params.data() + off;

    switch (l.kind) {
      case LayerKind::conv1d:
        conv1d_fwd(l, w, in, si, out, so);
        break;
      case LayerKind::conv2d:
        conv2d_fwd(l, w, in, si, out, so);
        break;
      case LayerKind::relu:
        kernels::relu(in, out, si.count());
        break;
      case LayerKind::mean_pool2d: {
        double inv = 1.0 / (static_cast<double>(l.pool) * l.pool);
        size_t in_plane = static_cast<size_t>(si.h) * si.w;
        size_t out_plane = static_cast<size_t>(so.h) * so.w;
        for (int c = 0; c < si.c; ++c) {
          for (int y = 0; y < so.h; ++y) {
            for (int x = 0; x < so.w; ++x) {
              double acc = 0.0;
              for (int py = 0; py < l.pool; ++py) {
                for (int px = 0; px < l.pool; ++px) {
                  acc += in[c * in_plane + (y * l.pool + py) * static_cast<size_t>(si.w) +
                            (x * l.pool + px)];
                }
              }
              out[c * out_plane + static_cast<size_t>(y) * so.w + x] = acc * inv;
            }
          }
        }
        break;
      }
      case LayerKind::global_mean_pool: {
        size_t plane = static_cast<size_t>(si.h) * si.w;
        double inv = 1.0 / static_cast<double>(plane);
        for (int c = 0; c < si.c; ++c) {
          out[c] = kernels::sum(in + static_cast<size_t>(c) * plane, plane) * inv;
        }
        break;
      }
      case LayerKind::dense: {
        const double* bias = w + static_cast<size_t>(l.out_dim) * l.in_dim;
        for (int o = 0; o < l.out_dim; ++o) {
          out[o] = bias[o] + kernels::dot(w + static_cast<size_t>(o) * l.in_dim, in,
                                          static_cast<size_t>(l.in_dim));
        }
        break;
      }
    }
    check_finite(st.act[i + 1], i, l.kind);
    off += weight_count(l);
  }

  const std::vector<double>& last = st.act.back();
  if (last.size() != 2) throw ShapeError("detector: final layer must emit 2 logits");
  return {last[0], last[1]};
}

void Detector::net_backward(const NetState& st, std::array<double, 2> upstream,
                            std::vector<double>* param_grad,
                            std::vector<double>* feat_grad) const {
  if (st.act.size() != layers.size() + 1) throw ShapeError("detector: stale net state");
  if (param_grad != nullptr && param_grad->size() != params.size()) {
    throw ShapeError("detector: param_grad size mismatch");
  }

  std::vector<size_t> offsets(layers.size());
  size_t off = 0;
  for (size_t i = 0; i < layers.size(); ++i) {
    offsets[i] = off;
    off += weight_count(layers[i]);
  }

  std::vector<double> g = {upstream[0], upstream[1]};
  bool need_input = feat_grad != nullptr;

  for (size_t ii = layers.size(); ii-- > 0;) {
    const LayerDesc& l = layers[ii];
    const Shape& si = st.shapes[ii];
    const Shape& so = st.shapes[ii + 1];
    const double* in = st.act[ii].data();
    const double* w = params.data() + offsets[ii];
    double* gw = param_grad != nullptr ? param_grad->data() + offsets[ii] : nullptr;
    bool last_param_layer = param_grad == nullptr && !need_input;
    if (last_param_layer) break;

    // Skip propagating below the first layer when the caller only wants
    // parameter gradients and there is nothing left to update underneath.
    bool want_gin = need_input || ii > 0;
    std::vector<double> gin;
    if (want_gin) gin.assign(si.count(), 0.0);

    switch (l.kind) {
      case LayerKind::conv1d:
        conv1d_bwd(l, w, in, si, g.data(), so, gw, want_gin ? gin.data() : nullptr);
        break;
      case LayerKind::conv2d:
        conv2d_bwd(l, w, in, si, g.data(), so, gw, want_gin ? gin.data() : nullptr);
        break;
      case LayerKind::relu:
        if (want_gin) kernels::relu_mask(in, g.data(), gin.data(), si.count());
        break;
      case LayerKind::mean_pool2d: {
        if (!want_gin) break;
        double inv = 1.0 / (static_cast<double>(l.pool) * l.pool);
        size_t in_plane = static_cast<size_t>(si.h) * si.w;
        size_t out_plane = static_cast<size_t>(so.h) * so.w;
        for (int c = 0; c < si.c; ++c) {
          for (int y = 0; y < so.h; ++y) {
            for (int x = 0; x < so.w; ++x) {
              double gv = g[c * out_plane + static_cast<size_t>(y) * so.w + x] * inv;
              for (int py = 0; py < l.pool; ++py) {
                for (int px = 0; px < l.pool; ++px) {
                  gin[c * in_plane + (y * l.pool + py) * static_cast<size_t>(si.w) +
                      (x * l.pool + px)] += gv;
                }
              }
            }
          }
        }
        break;
      }
      case LayerKind::global_mean_pool: {
        if (!want_gin) break;
        size_t plane = static_cast<size_t>(si.h) * si.w;
        double inv = 1.0 / static_cast<double>(plane);
        for (int c = 0; c < si.c; ++c) {
          double gv = g[static_cast<size_t>(c)] * inv;
          for (size_t i = 0; i < plane; ++i) gin[c * plane + i] = gv;
        }
        break;
      }
      case LayerKind::dense: {
        const size_t in_dim = static_cast<size_t>(l.in_dim);
        double* gbias = gw != nullptr ? gw + static_cast<size_t>(l.out_dim) * l.in_dim : nullptr;
        for (int o = 0; o < l.out_dim; ++o) {
          double gv = g[static_cast<size_t>(o)];
          if (gv == 0.0) continue;
          if (gw != nullptr) {
            kernels::axpy(gv, in, gw + static_cast<size_t>(o) * in_dim, in_dim);
            gbias[o] += gv;
          }
          if (want_gin) {
            kernels::axpy(gv, w + static_cast<size_t>(o) * in_dim, gin.data(), in_dim);
          }
        }
        break;
      }
    }
    if (!want_gin) break;
    g = std::move(gin);
  }

  if (feat_grad != nullptr) *feat_grad = std::move(g);
}

std::vector<double> Detector::input_grad_from_features(
    std::span<const double> x, const std::vector<double>& feat_grad) const {
  if (kind == DetectorKind::raw) return feat_grad;
  Shape fs = feature_shape();
  audio::Spectrogram up;
  up.frames = static_cast<size_t>(fs.h);
  up.bins = static_cast<size_t>(fs.w);
  up.v = feat_grad;
  up.frame_hop = front.hop;
  up.bin_kind = audio::BinKind::mel;
  up.log_scaled = true;
  audio::AudioClip clip;
  clip.samples.assign(x.begin(), x.end());
  clip.sample_rate = sample_rate;
  clip.id = "bwd";
  return audio::logmel_input_gradient(clip, front, up);
}

std::array<double, 2> Detector::logits(std::span<const double> x) const {
  NetState st;
  std::vector<double> feat = features(x);
  return net_forward(feat, st);
}

std::vector<double> Detector::logit_grad(std::span<const double> x,
                                         std::array<double, 2> w) const {
  NetState st;
  std::vector<double> feat = features(x);
  net_forward(feat, st);
  std::vector<double> fg;
  net_backward(st, w, nullptr, &fg);
  return input_grad_from_features(x, fg);
}

std::string Detector::param_fingerprint() const {
  std::string_view bytes(reinterpret_cast<const char*>(params.data()),
                         params.size() * sizeof(double));
  uint64_t h = hash64(bytes);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Detector finish_build(Detector det, uint64_t seed) {
  // Validate the stack and compute parameter layout.
  Shape s = det.feature_shape();
  size_t total = 0;
  for (const LayerDesc& l : det.layers) {
    s = output_shape(l, s);
    total += weight_count(l);
  }
  if (s.count() != 2) throw ShapeError("detector: architecture does not end in 2 logits");

  det.init_seed = seed;
  det.params.assign(total, 0.0);
  det.slices.clear();
  Rng rng(hash_combine(seed, "init"));
  size_t off = 0;
  int idx = 0;
  for (const LayerDesc& l : det.layers) {
    size_t n = weight_count(l);
    if (n > 0) {
      int fi = fan_in(l);
      double bound = 1.0 / std::sqrt(static_cast<double>(fi));
      size_t n_weights = n - static_cast<size_t>(l.kind == LayerKind::dense ? l.out_dim
                                                                            : l.out_ch);
      for (size_t i = 0; i < n_weights; ++i) {
        det.params[off + i] = rng.uniform(-bound, bound);
      }
      det.slices.push_back({std::string(layer_name(l.kind)) + std::to_string(idx), off, n});
    }
    off += n;
    ++idx;
  }
  return det;
}

}  // namespace

Detector make_raw_tiny(int input_samples, uint64_t seed, int sample_rate) {
  if (input_samples < 600) throw ParamError("raw detector needs at least 600 samples");
  Detector det;
  det.kind = DetectorKind::raw;
  det.input_samples = input_samples;
  det.sample_rate = sample_rate;
  int chans[4] = {8, 16, 32, 32};
  int in_c = 1;
  for (int i = 0; i < 4; ++i) {
    LayerDesc conv;
    conv.kind = LayerKind::conv1d;
    conv.in_ch = in_c;
    conv.out_ch = chans[i];
    conv.kernel = 9;
    conv.stride = 4;
    det.layers.push_back(conv);
    det.layers.push_back({.kind = LayerKind::relu});
    in_c = chans[i];
  }
  det.layers.push_back({.kind = LayerKind::global_mean_pool});
  LayerDesc fc;
  fc.kind = LayerKind::dense;
  fc.in_dim = 32;
  fc.out_dim = 2;
  det.layers.push_back(fc);
  return finish_build(std::move(det), seed);
}

Detector make_spec_tiny(int input_samples, uint64_t seed, int sample_rate,
                        const audio::StftConfig& front) {
  Detector det;
  det.kind = DetectorKind::spectrogram;
  det.input_samples = input_samples;
  det.sample_rate = sample_rate;
  det.front = front;
  audio::validate(det.front, sample_rate);

  int chans[2] = {8, 16};
  int in_c = 1;
  for (int i = 0; i < 2; ++i) {
    LayerDesc conv;
    conv.kind = LayerKind::conv2d;
    conv.in_ch = in_c;
    conv.out_ch = chans[i];
    conv.kernel = 3;
    conv.stride = 1;
    det.layers.push_back(conv);
    det.layers.push_back({.kind = LayerKind::relu});
    LayerDesc pool;
    pool.kind = LayerKind::mean_pool2d;
    pool.pool = 2;
    det.layers.push_back(pool);
    in_c = chans[i];
  }
  det.layers.push_back({.kind = LayerKind::global_mean_pool});
  LayerDesc fc;
  fc.kind = LayerKind::dense;
  fc.in_dim = 16;
  fc.out_dim = 2;
  det.layers.push_back(fc);
  return finish_build(std::move(det), seed);
}

namespace {

constexpr char kMagic[4] = {'A', 'F', 'C', 'K'};
constexpr uint32_t kVersion = 1;

template <class T>
void put(std::string& s, const T& v) {
  s.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(const std::string& s, size_t& off, const std::string& path) {
  if (off + sizeof(T) > s.size()) throw FormatError("truncated checkpoint: " + path);
  T v;
  std::memcpy(&v, s.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Detector& det) {
  std::string out;
  out.append(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<uint8_t>(det.kind));
  put(out, det.defended);
  put(out, static_cast<int32_t>(det.input_samples));
  put(out, static_cast<int32_t>(det.sample_rate));
  put(out, det.init_seed);
  put(out, static_cast<int32_t>(det.front.window_len));
  put(out, static_cast<int32_t>(det.front.hop));
  put(out, static_cast<int32_t>(det.front.fft_size));
  put(out, static_cast<int32_t>(det.front.mel_bins));
  put(out, det.front.fmin);
  put(out, det.front.fmax);
  put(out, det.front.log_floor);
  put(out, static_cast<uint32_t>(det.layers.size()));
  for (const LayerDesc& l : det.layers) {
    put(out, static_cast<uint8_t>(l.kind));
    put(out, static_cast<int32_t>(l.in_ch));
    put(out, static_cast<int32_t>(l.out_ch));
    put(out, static_cast<int32_t>(l.kernel));
    put(out, static_cast<int32_t>(l.stride));
    put(out, static_cast<int32_t>(l.pool));
    put(out, static_cast<int32_t>(l.in_dim));
    put(out, static_cast<int32_t>(l.out_dim));
  }
  put(out, static_cast<uint64_t>(det.params.size()));
  out.append(reinterpret_cast<const char*>(det.params.data()),
             det.params.size() * sizeof(double));

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write checkpoint: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write on checkpoint: " + path);
}

Detector load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (s.size() < 8 || std::memcmp(s.data(), kMagic, 4) != 0) {
    throw FormatError("not a checkpoint file: " + path);
  }
  size_t off = 4;
  uint32_t version = take<uint32_t>(s, off, path);
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  Detector det;
  uint8_t kind = take<uint8_t>(s, off, path);
  if (kind > 1) throw FormatError("bad detector kind in checkpoint: " + path);
  det.kind = static_cast<DetectorKind>(kind);
  det.defended = take<uint8_t>(s, off, path);
  det.input_samples = take<int32_t>(s, off, path);
  det.sample_rate = take<int32_t>(s, off, path);
  det.init_seed = take<uint64_t>(s, off, path);
  det.front.window_len = take<int32_t>(s, off, path);
  det.front.hop = take<int32_t>(s, off, path);
  det.front.fft_size = take<int32_t>(s, off, path);
  det.front.mel_bins = take<int32_t>(s, off, path);
  det.front.fmin = take<double>(s, off, path);
  det.front.fmax = take<double>(s, off, path);
  det.front.log_floor = take<double>(s, off, path);
  uint32_t n_layers = take<uint32_t>(s, off, path);
  if (n_layers > 256) throw FormatError("implausible layer count in checkpoint: " + path);
  for (uint32_t i = 0; i < n_layers; ++i) {
    LayerDesc l;
    uint8_t lk = take<uint8_t>(s, off, path);
    if (lk > 5) throw FormatError("bad layer kind in checkpoint: " + path);
    l.kind = static_cast<LayerKind>(lk);
    l.in_ch = take<int32_t>(s, off, path);
    l.out_ch = take<int32_t>(s, off, path);
    l.kernel = take<int32_t>(s, off, path);
    l.stride = take<int32_t>(s, off, path);
    l.pool = take<int32_t>(s, off, path);
    l.in_dim = take<int32_t>(s, off, path);
    l.out_dim = take<int32_t>(s, off, path);
    det.layers.push_back(l);
  }
  uint64_t n_params = take<uint64_t>(s, off, path);
  if (off + n_params * sizeof(double) != s.size()) {
    throw FormatError("checkpoint parameter block size mismatch: " + path);
  }
  det.params.resize(n_params);
  std::memcpy(det.params.data(), s.data() + off, n_params * sizeof(double));

  // Rebuild slices and sanity-check the architecture against the params.
  Shape shape = det.feature_shape();
  size_t total = 0;
  int idx = 0;
  for (const LayerDesc& l : det.layers) {
    shape = output_shape(l, shape);
    size_t n = weight_count(l);
    if (n > 0) det.slices.push_back({std::string(layer_name(l.kind)) + std::to_string(idx), total, n});
    total += n;
    ++idx;
  }
  if (total != det.params.size()) {
    throw FormatError("checkpoint parameter count mismatch: " + path);
  }
  if (shape.count() != 2) throw FormatError("checkpoint architecture invalid: " + path);
  return det;
}

}  // namespace af::nn
