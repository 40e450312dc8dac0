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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "af/audio.hpp"
#include "af/common.hpp"
#include "af/rng.hpp"

namespace fs = std::filesystem;
using af::audio::AudioClip;

namespace {

fs::path temp_dir() {
  fs::path p = fs::temp_directory_path() / "af_test_audio";
  fs::create_directories(p);
  return p;
}

AudioClip sine(double freq, int rate, size_t n, double amp = 0.5) {
  AudioClip c;
  c.sample_rate = rate;
  c.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    c.samples[i] = amp * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / rate);
  }
  return c;
}

}  // namespace

TEST_SUITE_BEGIN("audio");

TEST_CASE("pcm16 wav round trip is exact on representable values") {
  AudioClip c;
  c.sample_rate = 16000;
  c.id = "t";
  for (int s : {-32768, -12345, -1, 0, 1, 777, 32767}) {
    c.samples.push_back(s / 32768.0);
  }
  fs::path p = temp_dir() / "pcm16.wav";
  af::audio::write_wav(p.string(), c, af::audio::WavEncoding::pcm16);
  AudioClip back = af::audio::read_wav(p.string());
  REQUIRE(back.len() == c.len());
  CHECK(back.sample_rate == 16000);
  for (size_t i = 0; i < c.len(); ++i) CHECK(back.samples[i] == c.samples[i]);
}

TEST_CASE("pcm16 writer clips out-of-range samples") {
  AudioClip c;
  c.sample_rate = 8000;
  c.samples = {1.5, -2.0, 0.25};
  fs::path p = temp_dir() / "clip.wav";
  af::audio::write_wav(p.string(), c, af::audio::WavEncoding::pcm16);
  AudioClip back = af::audio::read_wav(p.string());
  CHECK(back.samples[0] == doctest::Approx(32767.0 / 32768.0));
  CHECK(back.samples[1] == -1.0);
  CHECK(back.samples[2] == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("float32 wav preserves out-of-range values") {
  AudioClip c;
  c.sample_rate = 16000;
  c.samples = {1.25, -3.5, 0.125, 0.0};
  fs::path p = temp_dir() / "f32.wav";
  af::audio::write_wav(p.string(), c, af::audio::WavEncoding::float32);
  AudioClip back = af::audio::read_wav(p.string());
  REQUIRE(back.len() == 4);
  CHECK(back.samples[0] == 1.25);
  CHECK(back.samples[1] == -3.5);
  CHECK(back.samples[2] == 0.125);
}

TEST_CASE("float32 round trip matches float(double) exactly") {
  af::Rng rng(3);
  AudioClip c;
  c.sample_rate = 16000;
  for (int i = 0; i < 257; ++i) c.samples.push_back(rng.uniform(-1.2, 1.2));
  fs::path p = temp_dir() / "f32rt.wav";
  af::audio::write_wav(p.string(), c, af::audio::WavEncoding::float32);
  AudioClip back = af::audio::read_wav(p.string());
  REQUIRE(back.len() == c.len());
  for (size_t i = 0; i < c.len(); ++i) {
    CHECK(back.samples[i] == static_cast<double>(static_cast<float>(c.samples[i])));
  }
}

TEST_CASE("stereo input is averaged to mono") {
  // Hand-built 2-channel PCM16 file: frames (L, R) = (1000, 3000), (-2000, 2000).
  fs::path p = temp_dir() / "stereo.wav";
  std::vector<int16_t> frames = {1000, 3000, -2000, 2000};
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  auto put32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put16 = [&](uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  out.write("RIFF", 4);
  put32(36 + 8);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put32(16);
  put16(1);       // PCM
  put16(2);       // channels
  put32(16000);   // rate
  put32(16000 * 4);
  put16(4);
  put16(16);
  out.write("data", 4);
  put32(8);
  for (int16_t s : frames) put16(static_cast<uint16_t>(s));
  out.close();

  AudioClip back = af::audio::read_wav(p.string());
  REQUIRE(back.len() == 2);
  CHECK(back.samples[0] == doctest::Approx(2000.0 / 32768.0));
  CHECK(back.samples[1] == doctest::Approx(0.0));
}

TEST_CASE("truncated and malformed wav files raise format errors") {
  fs::path p = temp_dir() / "bad.wav";
  {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write("RIFFxx", 6);
  }
  CHECK_THROWS_AS(af::audio::read_wav(p.string()), af::FormatError);
  {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write("NOPE", 4);
  }
  CHECK_THROWS_AS(af::audio::read_wav(p.string()), af::FormatError);
  CHECK_THROWS_AS(af::audio::read_wav((temp_dir() / "missing.wav").string()), af::IoError);
}

TEST_CASE("normalize_length wraps and truncates") {
  AudioClip c;
  c.sample_rate = 16000;
  c.samples = {1.0, 2.0, 3.0};
  AudioClip longer = af::audio::normalize_length(c, 7);
  CHECK(longer.samples == std::vector<double>{1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0});
  AudioClip shorter = af::audio::normalize_length(c, 2);
  CHECK(shorter.samples == std::vector<double>{1.0, 2.0});
  AudioClip same = af::audio::normalize_length(c, 3);
  CHECK(same.samples == c.samples);
}

TEST_CASE("resampler preserves a mid-band sine") {
  // 440 Hz sine resampled 16 kHz -> 8 kHz; both rates are far above the
  // signal band, so the interior should be nearly unchanged.
  AudioClip c = sine(440.0, 16000, 16000);
  AudioClip down = af::audio::resample(c, 8000);
  CHECK(down.sample_rate == 8000);
  CHECK(down.len() == 8000);
  double err = 0.0;
  for (size_t i = 200; i + 200 < down.len(); ++i) {
    double t = static_cast<double>(i) / 8000.0;
    double want = 0.5 * std::sin(2.0 * M_PI * 440.0 * t);
    err = std::max(err, std::abs(down.samples[i] - want));
  }
  CHECK(err < 5e-3);
}

TEST_CASE("resample_by_ratio output length is round(n * ratio)") {
  std::vector<double> x(1000, 0.1);
  CHECK(af::audio::resample_by_ratio(x, 0.5).size() == 500);
  CHECK(af::audio::resample_by_ratio(x, 2.0).size() == 2000);
  CHECK(af::audio::resample_by_ratio(x, 1.059463094359295).size() == 1059);
}

TEST_CASE("downsampling suppresses content above the new nyquist") {
  // 7 kHz tone cannot survive a move to 8 kHz (nyquist 4 kHz).
  AudioClip c = sine(7000.0, 16000, 16000);
  AudioClip down = af::audio::resample(c, 8000);
  double peak = 0.0;
  for (size_t i = 100; i + 100 < down.len(); ++i) {
    peak = std::max(peak, std::abs(down.samples[i]));
  }
  CHECK(peak < 0.02);
}

TEST_CASE("resample round trip approximates identity for band-limited input") {
  AudioClip c = sine(300.0, 16000, 4000);
  AudioClip up = af::audio::resample(c, 32000);
  AudioClip back = af::audio::resample(up, 16000);
  REQUIRE(back.len() == c.len());
  double err = 0.0;
  for (size_t i = 100; i + 100 < c.len(); ++i) {
    err = std::max(err, std::abs(back.samples[i] - c.samples[i]));
  }
  CHECK(err < 5e-3);
}

TEST_CASE("validate rejects empty clips and bad rates") {
  AudioClip c;
  c.sample_rate = 16000;
  CHECK_THROWS_AS(af::audio::validate(c), af::DataError);
  c.samples = {0.0};
  c.sample_rate = 0;
  CHECK_THROWS_AS(af::audio::validate(c), af::DataError);
  c.sample_rate = 16000;
  CHECK_NOTHROW(af::audio::validate(c));
}

TEST_SUITE_END();
