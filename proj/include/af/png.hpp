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

#include <cstdint>
#include <string>
#include <vector>

#include "af/metrics.hpp"
#include "af/stft.hpp"

namespace af::png {

struct Image {
  size_t width = 0;
  size_t height = 0;
  std::vector<uint8_t> rgb;  // 3 bytes per pixel, rows top to bottom

  Image() = default;
  Image(size_t w, size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}
  void set(size_t x, size_t y, uint8_t r, uint8_t g, uint8_t b) {
    size_t o = (y * width + x) * 3;
    rgb[o] = r;
    rgb[o + 1] = g;
    rgb[o + 2] = b;
  }
};

// Truecolor 8-bit PNG, zlib-compressed, no ancillary chunks.
void write_png(const std::string& path, const Image& img);

// Perceptually ordered dark-to-bright palette; v outside [0, 1] is clamped.
void colormap(double v, uint8_t rgb[3]);

// Digits, dot, dash and space in a 5x7 pixel font scaled by `scale`.
void draw_text(Image& img, size_t x, size_t y, const std::string& text, int scale,
               uint8_t r, uint8_t g, uint8_t b);

// One spectrogram as an image: time left to right, low bins at the bottom,
// `cell` screen pixels per grid cell. Values are expected in [0, 1].
Image render_spectrogram(const audio::Spectrogram& g, int cell = 2);

// Original, attacked and |difference| side by side, sharing the palette.
// Both grids must already share one normalization (see QualityPair).
Image render_triptych(const audio::Spectrogram& original, const audio::Spectrogram& attacked,
                      int cell = 2);

// 2x2 heat cells with count labels; rows = true class, columns = predicted,
// real before fake on both axes.
Image render_confusion(const metrics::Confusion& c, int cell_px = 96);

}  // namespace af::png
