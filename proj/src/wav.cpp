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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "af/audio.hpp"
#include "af/common.hpp"

namespace af::audio {

namespace {

constexpr uint16_t kFmtPcm = 1;
constexpr uint16_t kFmtFloat = 3;

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::string& s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void wr_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

void validate(const AudioClip& c) {
  if (c.samples.empty()) throw DataError("audio clip has no samples");
  if (c.sample_rate <= 0) throw DataError("audio clip has invalid sample rate");
}

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data());
  size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file: " + path);
  }

  uint16_t fmt = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t off = 12;
  while (off + 8 <= n) {
    const unsigned char* ch = p + off;
    uint32_t sz = rd_u32(ch + 4);
    size_t body = off + 8;
    if (body + sz > n) throw FormatError("truncated chunk in wav file: " + path);
    if (std::memcmp(ch, "fmt ", 4) == 0) {
      if (sz < 16) throw FormatError("fmt chunk too small: " + path);
      fmt = rd_u16(p + body);
      channels = rd_u16(p + body + 2);
      rate = rd_u32(p + body + 4);
      bits = rd_u16(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(ch, "data", 4) == 0) {
      data_off = body;
      data_len = sz;
    }
    off = body + sz + (sz & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) throw FormatError("missing fmt/data chunk: " + path);
  if (channels == 0 || rate == 0) throw FormatError("bad wav header: " + path);
  if (!((fmt == kFmtPcm && bits == 16) || (fmt == kFmtFloat && bits == 32))) {
    throw FormatError("unsupported wav encoding (want PCM16 or float32): " + path);
  }

  size_t bytes_per = bits / 8;
  size_t frame_bytes = bytes_per * channels;
  if (frame_bytes == 0 || data_len % frame_bytes != 0) {
    throw FormatError("data chunk size not a multiple of frame size: " + path);
  }
  size_t frames = data_len / frame_bytes;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.id = std::filesystem::path(path).stem().string();
  clip.samples.resize(frames);
  const unsigned char* d = p + data_off;
  double inv_ch = 1.0 / static_cast<double>(channels);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const unsigned char* s = d + (i * channels + c) * bytes_per;
      if (fmt == kFmtPcm) {
        int16_t v = static_cast<int16_t>(s[0] | (s[1] << 8));
        acc += static_cast<double>(v) / 32768.0;
      } else {
        uint32_t u = rd_u32(s);
        float f;
        std::memcpy(&f, &u, 4);
        acc += static_cast<double>(f);
      }
    }
    clip.samples[i] = acc * inv_ch;
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip, WavEncoding enc) {
  validate(clip);
  uint16_t bits = enc == WavEncoding::pcm16 ? 16 : 32;
  uint16_t fmt = enc == WavEncoding::pcm16 ? kFmtPcm : kFmtFloat;
  uint32_t rate = static_cast<uint32_t>(clip.sample_rate);
  uint32_t data_len = static_cast<uint32_t>(clip.len() * bits / 8);

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  wr_u32(out, 36 + data_len);
  out += "WAVE";
  out += "fmt ";
  wr_u32(out, 16);
  wr_u16(out, fmt);
  wr_u16(out, 1);  // mono
  wr_u32(out, rate);
  wr_u32(out, rate * bits / 8);
  wr_u16(out, static_cast<uint16_t>(bits / 8));
  wr_u16(out, bits);
  out += "data";
  wr_u32(out, data_len);

  if (enc == WavEncoding::pcm16) {
    for (double x : clip.samples) {
      double v = std::round(x * 32768.0);
      v = std::min(32767.0, std::max(-32768.0, v));
      wr_u16(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
    }
  } else {
    for (double x : clip.samples) {
      float f = static_cast<float>(x);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      wr_u32(out, u);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write wav file: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write on wav file: " + path);
}

}  // namespace af::audio
