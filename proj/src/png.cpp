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

#include "af/png.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "af/common.hpp"

namespace af::png {

namespace {

void put_u32_be(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string& out, const char type[4], const std::string& data) {
  put_u32_be(out, static_cast<uint32_t>(data.size()));
  size_t start = out.size();
  out.append(type, 4);
  out.append(data);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(out.data() + start), out.size() - start);
  put_u32_be(out, static_cast<uint32_t>(crc));
}

}  // namespace

void write_png(const std::string& path, const Image& img) {
  if (img.width == 0 || img.height == 0) throw ShapeError("png: empty image");
  if (img.rgb.size() != img.width * img.height * 3) throw ShapeError("png: pixel buffer size");

  // Scanlines with filter byte 0 (None).
  std::string raw;
  raw.reserve(img.height * (1 + img.width * 3));
  for (size_t y = 0; y < img.height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(&img.rgb[y * img.width * 3]), img.width * 3);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  int rc = compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                     reinterpret_cast<const Bytef*>(raw.data()),
                     static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION);
  if (rc != Z_OK) throw IoError("png: deflate failed for " + path);
  compressed.resize(bound);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32_be(ihdr, static_cast<uint32_t>(img.width));
  put_u32_be(ihdr, static_cast<uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // no interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", "");

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write image: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write on image: " + path);
}

namespace {

// Anchor colors sampled along a dark-violet to yellow ramp.
constexpr uint8_t kPalette[9][3] = {
    {68, 1, 84},   {72, 40, 120},  {62, 74, 137},  {49, 104, 142}, {38, 130, 142},
    {31, 158, 137}, {53, 183, 121}, {109, 205, 89}, {253, 231, 37},
};

}  // namespace

void colormap(double v, uint8_t rgb[3]) {
  if (!(v > 0.0)) v = 0.0;
  if (v > 1.0) v = 1.0;
  double pos = v * 8.0;
  int lo = static_cast<int>(pos);
  if (lo >= 8) lo = 7;
  double f = pos - lo;
  for (int c = 0; c < 3; ++c) {
    double a = kPalette[lo][c];
    double b = kPalette[lo + 1][c];
    rgb[c] = static_cast<uint8_t>(std::lround(a + f * (b - a)));
  }
}

namespace {

// 5x7 glyphs, one bit per pixel, row-major from the top.
struct Glyph {
  char ch;
  uint8_t rows[7];
};

constexpr Glyph kFont[] = {
    {'0', {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}},
    {'1', {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e}},
    {'2', {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}},
    {'3', {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e}},
    {'4', {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}},
    {'5', {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e}},
    {'6', {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}},
    {'7', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}},
    {'9', {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c}},
    {'-', {0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const Glyph* find_glyph(char c) {
  for (const Glyph& g : kFont) {
    if (g.ch == c) return &g;
  }
  return nullptr;
}

}  // namespace

void draw_text(Image& img, size_t x, size_t y, const std::string& text, int scale,
               uint8_t r, uint8_t g, uint8_t b) {
  size_t cx = x;
  for (char ch : text) {
    const Glyph* gl = find_glyph(ch);
    if (gl == nullptr) gl = find_glyph(' ');
    for (int row = 0; row < 7; ++row) {
      for (int col = 0; col < 5; ++col) {
        if ((gl->rows[row] >> (4 - col)) & 1) {
          for (int sy = 0; sy < scale; ++sy) {
            for (int sx = 0; sx < scale; ++sx) {
              size_t px = cx + static_cast<size_t>(col) * scale + sx;
              size_t py = y + static_cast<size_t>(row) * scale + sy;
              if (px < img.width && py < img.height) img.set(px, py, r, g, b);
            }
          }
        }
      }
    }
    cx += static_cast<size_t>(6) * scale;  // 5 columns + 1 space
  }
}

namespace {

void blit_grid(Image& img, const audio::Spectrogram& g, size_t x0, size_t y0, int cell) {
  // Rows of the image walk the bins top-down, so high frequencies sit on top.
  for (size_t f = 0; f < g.frames; ++f) {
    for (size_t b = 0; b < g.bins; ++b) {
      uint8_t rgb[3];
      colormap(g.at(f, b), rgb);
      size_t px = x0 + f * cell;
      size_t py = y0 + (g.bins - 1 - b) * cell;
      for (int sy = 0; sy < cell; ++sy) {
        for (int sx = 0; sx < cell; ++sx) {
          img.set(px + sx, py + sy, rgb[0], rgb[1], rgb[2]);
        }
      }
    }
  }
}

}  // namespace

Image render_spectrogram(const audio::Spectrogram& g, int cell) {
  if (g.frames == 0 || g.bins == 0) throw ShapeError("render: empty spectrogram");
  if (cell < 1) throw ParamError("render: cell size must be >= 1");
  Image img(g.frames * cell, g.bins * cell);
  blit_grid(img, g, 0, 0, cell);
  return img;
}

Image render_triptych(const audio::Spectrogram& original, const audio::Spectrogram& attacked,
                      int cell) {
  if (original.frames != attacked.frames || original.bins != attacked.bins) {
    throw ShapeError("render: triptych grids differ in shape");
  }
  if (original.frames == 0 || original.bins == 0) throw ShapeError("render: empty spectrogram");
  if (cell < 1) throw ParamError("render: cell size must be >= 1");

  audio::Spectrogram diff = original;
  for (size_t i = 0; i < diff.v.size(); ++i) {
    diff.v[i] = std::fabs(attacked.v[i] - original.v[i]);
  }

  constexpr size_t kGap = 2;
  size_t pw = original.frames * cell;
  size_t ph = original.bins * cell;
  Image img(pw * 3 + kGap * 2, ph);
  for (size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = 255;  // white separators
  blit_grid(img, original, 0, 0, cell);
  blit_grid(img, attacked, pw + kGap, 0, cell);
  blit_grid(img, diff, 2 * (pw + kGap), 0, cell);
  return img;
}

Image render_confusion(const metrics::Confusion& c, int cell_px) {
  if (cell_px < 32) throw ParamError("render: confusion cells need at least 32 px");
  long long counts[2][2] = {{c.tn, c.fp}, {c.fn, c.tp}};
  long long mx = 1;
  for (auto& row : counts) {
    for (long long v : row) mx = std::max(mx, v);
  }

  size_t cs = static_cast<size_t>(cell_px);
  constexpr size_t kBorder = 2;
  Image img(cs * 2 + kBorder * 3, cs * 2 + kBorder * 3);
  for (size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = 255;

  for (int row = 0; row < 2; ++row) {
    for (int col = 0; col < 2; ++col) {
      double v = static_cast<double>(counts[row][col]) / static_cast<double>(mx);
      uint8_t rgb[3];
      colormap(v, rgb);
      size_t x0 = kBorder + col * (cs + kBorder);
      size_t y0 = kBorder + row * (cs + kBorder);
      for (size_t y = 0; y < cs; ++y) {
        for (size_t x = 0; x < cs; ++x) {
          img.set(x0 + x, y0 + y, rgb[0], rgb[1], rgb[2]);
        }
      }
      std::string label = std::to_string(counts[row][col]);
      int scale = 2;
      size_t tw = label.size() * 6 * scale;
      size_t tx = x0 + (cs > tw ? (cs - tw) / 2 : 0);
      size_t ty = y0 + cs / 2 - 7 * scale / 2;
      uint8_t tone = v > 0.6 ? 0 : 255;
      draw_text(img, tx, ty, label, scale, tone, tone, tone);
    }
  }
  return img;
}

}  // namespace af::png
