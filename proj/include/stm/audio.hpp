// include/stm/audio.hpp

// Copyright 2026 The stmaudio Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stm/common.hpp"
#include "stm/resample.hpp"

namespace stm {

/// Mono sample buffer, the canonical pipeline input. Samples are nominally
/// in [-1, 1]; the rate after load_audio is the pipeline rate.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

constexpr int kPipelineRate = 16000;

enum class WavEncoding { pcm16, float32 };

namespace wav_detail {

struct RawWav {
  int sample_rate = 0;
  int channels = 0;
  WavEncoding encoding = WavEncoding::pcm16;
  std::vector<double> interleaved;
};

inline RawWav read_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open audio file: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw FileError("read failed: " + path);
  if (data.empty()) throw EmptyAudioError("zero-length file: " + path);
  bytes::Reader r(data);
  if (data.size() < 12 || data.compare(0, 4, "RIFF") != 0 ||
      data.compare(8, 4, "WAVE") != 0)
    throw UnsupportedEncodingError("not a RIFF/WAVE file: " + path);
  r.get_bytes(12);

  RawWav out;
  int bits = 0;
  uint16_t format = 0;
  bool have_fmt = false, have_data = false;
  std::string payload;
  while (r.remaining() >= 8) {
    std::string id = r.get_bytes(4);
    uint32_t sz = r.get<uint32_t>();
    if (sz > r.remaining()) sz = static_cast<uint32_t>(r.remaining());
    std::string body = r.get_bytes(sz);
    if (sz % 2 == 1 && r.remaining() > 0) r.get_bytes(1);  // chunk padding
    if (id == "fmt ") {
      if (body.size() < 16) throw FormatError("short fmt chunk: " + path);
      bytes::Reader f(body);
      format = f.get<uint16_t>();
      out.channels = f.get<uint16_t>();
      out.sample_rate = static_cast<int>(f.get<uint32_t>());
      f.get<uint32_t>();  // byte rate
      f.get<uint16_t>();  // block align
      bits = f.get<uint16_t>();
      if (format == 0xFFFE && body.size() >= 40) {
        bytes::Reader e(body);
        e.get_bytes(24);
        e.get<uint16_t>();  // valid bits
        e.get<uint32_t>();  // channel mask
        format = e.get<uint16_t>();  // GUID leads with the base format tag
      }
      have_fmt = true;
    } else if (id == "data") {
      payload = std::move(body);
      have_data = true;
    }
  }
  if (!have_fmt || !have_data)
    throw FormatError("missing fmt/data chunk: " + path);
  if (out.channels <= 0 || out.sample_rate <= 0)
    throw FormatError("bad fmt fields: " + path);

  if (format == 1 && bits == 16) {
    out.encoding = WavEncoding::pcm16;
    size_t n = payload.size() / 2;
    out.interleaved.resize(n);
    bytes::Reader p(payload);
    for (size_t i = 0; i < n; ++i)
      out.interleaved[i] = p.get<int16_t>() / 32768.0;
  } else if (format == 3 && bits == 32) {
    out.encoding = WavEncoding::float32;
    size_t n = payload.size() / 4;
    out.interleaved.resize(n);
    bytes::Reader p(payload);
    for (size_t i = 0; i < n; ++i)
      out.interleaved[i] = static_cast<double>(p.get<float>());
  } else {
    throw UnsupportedEncodingError(
        "unsupported WAV encoding (format tag " + std::to_string(format) +
        ", " + std::to_string(bits) + "-bit): " + path +
        " — expect 16-bit PCM or 32-bit float");
  }
  if (out.interleaved.empty()) throw EmptyAudioError("zero-length audio: " + path);
  return out;
}

}  // namespace wav_detail

/// Average interleaved channels down to mono.
inline std::vector<double> mix_to_mono(const std::vector<double>& interleaved,
                                       int channels) {
  if (channels == 1) return interleaved;
  size_t frames = interleaved.size() / channels;
  std::vector<double> mono(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) acc += interleaved[i * channels + c];
    mono[i] = acc / channels;
  }
  return mono;
}

/// Read a PCM16/float32 WAV of any channel count and rate, average to mono,
/// and resample to target_rate.
inline AudioClip load_audio(const std::string& path,
                            int target_rate = kPipelineRate) {
  if (target_rate <= 0)
    throw InvalidArgumentError("load_audio: target rate must be positive");
  auto raw = wav_detail::read_raw(path);
  AudioClip clip;
  clip.samples = mix_to_mono(raw.interleaved, raw.channels);
  if (clip.samples.empty()) throw EmptyAudioError("zero-length audio: " + path);
  clip.sample_rate = raw.sample_rate;
  if (raw.sample_rate != target_rate) {
    clip.samples = resample_poly(clip.samples, target_rate, raw.sample_rate);
    clip.sample_rate = target_rate;
  }
  clip.source_id = std::filesystem::path(path).stem().string();
  return clip;
}

/// Write a mono WAV. PCM16 quantizes with rounding; float32 is lossless for
/// float-valued samples.
inline void save_wav(const std::string& path, const std::vector<double>& x,
                     int sample_rate, WavEncoding enc = WavEncoding::pcm16) {
  if (x.empty()) throw EmptyAudioError("refusing to write empty WAV: " + path);
  std::string body;
  if (enc == WavEncoding::pcm16) {
    for (double v : x) {
      long q = std::lround(v * 32768.0);
      q = std::clamp(q, -32768l, 32767l);
      bytes::put<int16_t>(body, static_cast<int16_t>(q));
    }
  } else {
    for (double v : x) bytes::put<float>(body, static_cast<float>(v));
  }
  const uint16_t fmt = (enc == WavEncoding::pcm16) ? 1 : 3;
  const uint16_t bits = (enc == WavEncoding::pcm16) ? 16 : 32;
  const uint16_t block = static_cast<uint16_t>(bits / 8);
  std::string out;
  out += "RIFF";
  bytes::put<uint32_t>(out, static_cast<uint32_t>(36 + body.size()));
  out += "WAVEfmt ";
  bytes::put<uint32_t>(out, 16);
  bytes::put<uint16_t>(out, fmt);
  bytes::put<uint16_t>(out, 1);  // mono
  bytes::put<uint32_t>(out, static_cast<uint32_t>(sample_rate));
  bytes::put<uint32_t>(out, static_cast<uint32_t>(sample_rate * block));
  bytes::put<uint16_t>(out, block);
  bytes::put<uint16_t>(out, bits);
  out += "data";
  bytes::put<uint32_t>(out, static_cast<uint32_t>(body.size()));
  out += body;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FileError("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw FileError("write failed: " + path);
}

}  // namespace stm
