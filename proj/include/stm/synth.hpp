// include/stm/synth.hpp

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

#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "stm/audio.hpp"
#include "stm/fft.hpp"

// Synthetic two-class corpus for end-to-end runs without real speech.
// The classes differ in temporal modulation rate, the axis the modulation
// features are built to resolve: harmonic complexes under slow 4 Hz AM
// versus band-limited noise under fast 20 Hz AM.

namespace stm {

constexpr double kSynthSlowAmHz = 4.0;
constexpr double kSynthFastAmHz = 20.0;

namespace synth_detail {

inline void apply_am(std::vector<double>& x, double rate_hz, double depth,
                     double phase, int sample_rate) {
  for (size_t i = 0; i < x.size(); ++i) {
    double t = static_cast<double>(i) / sample_rate;
    x[i] *= 1.0 + depth * std::cos(2.0 * std::numbers::pi * rate_hz * t +
                                   phase);
  }
}

inline void normalize_peak(std::vector<double>& x, double peak) {
  double mx = 0.0;
  for (double v : x) mx = std::max(mx, std::abs(v));
  if (mx > 0.0)
    for (double& v : x) v *= peak / mx;
}

}  // namespace synth_detail

/// Class A: harmonic complex (random f0 and phases) with slow AM.
inline AudioClip synth_harmonic_am(uint64_t seed, int sample_rate = 16000,
                                   double duration_s = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uf0(110.0, 220.0);
  std::uniform_real_distribution<double> uphase(0.0,
                                                2.0 * std::numbers::pi);
  const double f0 = uf0(rng);
  const int harmonics = static_cast<int>(3500.0 / f0);
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(static_cast<size_t>(duration_s * sample_rate), 0.0);
  for (int h = 1; h <= harmonics; ++h) {
    const double phase = uphase(rng);
    const double amp = 1.0 / h;
    for (size_t i = 0; i < clip.samples.size(); ++i) {
      double t = static_cast<double>(i) / sample_rate;
      clip.samples[i] +=
          amp * std::cos(2.0 * std::numbers::pi * f0 * h * t + phase);
    }
  }
  synth_detail::apply_am(clip.samples, kSynthSlowAmHz, 0.9, uphase(rng),
                         sample_rate);
  synth_detail::normalize_peak(clip.samples, 0.7);
  return clip;
}

/// Class B: 500-4000 Hz noise with fast AM.
inline AudioClip synth_noise_am(uint64_t seed, int sample_rate = 16000,
                                double duration_s = 3.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> uphase(0.0,
                                                2.0 * std::numbers::pi);
  AudioClip clip;
  clip.sample_rate = sample_rate;
  const size_t n = static_cast<size_t>(duration_s * sample_rate);
  std::vector<fft::cplx> buf(n);
  for (auto& v : buf) v = fft::cplx(g(rng), 0.0);
  // Brick-wall band limit in the frequency domain.
  auto plan = fft::Plan::get(n);
  plan->forward(buf.data());
  for (size_t k = 0; k < n; ++k) {
    double f = static_cast<double>(k <= n / 2 ? k : n - k) * sample_rate / n;
    if (f < 500.0 || f > 4000.0) buf[k] = 0.0;
  }
  plan->inverse(buf.data());
  clip.samples.resize(n);
  for (size_t i = 0; i < n; ++i) clip.samples[i] = buf[i].real();
  synth_detail::apply_am(clip.samples, kSynthFastAmHz, 0.9, uphase(rng),
                         sample_rate);
  synth_detail::normalize_peak(clip.samples, 0.7);
  return clip;
}

/// Write the demo corpus: per class, `train_per_class` training clips and
/// `test_per_class` test clips (class A = genuine, class B = imitated).
/// Returns the manifest path.
inline std::string generate_demo_corpus(const std::string& dir, uint64_t seed,
                                        int train_per_class = 20,
                                        int test_per_class = 30) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::string manifest_body = "path,label,split,speaker_id,language\n";
  int serial = 0;
  auto emit = [&](bool harmonic, const char* split, int index) {
    const uint64_t clip_seed = fnv1a64(std::to_string(seed) + "/" +
                                       std::to_string(serial));
    ++serial;
    AudioClip clip = harmonic ? synth_harmonic_am(clip_seed)
                              : synth_noise_am(clip_seed);
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%s_%03d.wav",
                  harmonic ? "genuine" : "imitated", split, index);
    save_wav((fs::path(dir) / name).string(), clip.samples, clip.sample_rate,
             WavEncoding::float32);
    manifest_body += std::string(name) + "," +
                     (harmonic ? "genuine" : "imitated") + "," + split +
                     ",synth" + (harmonic ? "A" : "B") + ",none\n";
  };
  for (int i = 0; i < train_per_class; ++i) emit(true, "train", i);
  for (int i = 0; i < train_per_class; ++i) emit(false, "train", i);
  for (int i = 0; i < test_per_class; ++i) emit(true, "test", i);
  for (int i = 0; i < test_per_class; ++i) emit(false, "test", i);

  const auto manifest_path = fs::path(dir) / "manifest.csv";
  std::ofstream f(manifest_path);
  if (!f) throw FileError("cannot write " + manifest_path.string());
  f << manifest_body;
  return manifest_path.string();
}

}  // namespace stm
