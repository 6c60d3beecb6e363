// tests/test_filterbank.cpp

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

#include "stm/filterbank.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <numbers>
#include <random>

namespace {

// Time-domain convolution truncated to the input length; the oracle for the
// overlap-save path.
std::vector<double> direct_conv_prefix(const std::vector<double>& x,
                                       const std::vector<double>& h) {
  std::vector<double> y(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    size_t m_max = std::min(i + 1, h.size());
    double acc = 0.0;
    for (size_t m = 0; m < m_max; ++m) acc += h[m] * x[i - m];
    y[i] = acc;
  }
  return y;
}

std::vector<double> random_signal(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

double rms(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / x.size());
}

stm::FilterbankSpec small_spec(stm::FilterKind kind) {
  stm::FilterbankSpec s;
  s.kind = kind;
  s.num_channels = 8;
  s.f_min = 100.0;
  s.f_max = 4000.0;
  s.ir_length = 1536;
  return s;
}

}  // namespace

TEST_CASE("impulse responses start at zero and are peak-normalized") {
  auto fb = stm::build_filterbank(stm::FilterbankSpec{});
  REQUIRE(fb.center_freqs.size() == 64);
  REQUIRE(fb.center_freqs.front() == Catch::Approx(60.0).margin(1e-6));
  REQUIRE(fb.center_freqs.back() == Catch::Approx(7600.0).margin(1e-6));
  for (size_t k = 0; k < fb.impulse_responses.size(); ++k) {
    REQUIRE(fb.impulse_responses[k][0] == 0.0);
    auto pk = stm::measure_response_peak(fb.impulse_responses[k], 16000.0);
    REQUIRE(pk.magnitude == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("gammatone peaks sit at the center frequencies away from Nyquist") {
  auto fb = stm::build_filterbank(stm::FilterbankSpec{});
  const double bin = 16000.0 / 4096.0;
  for (size_t k = 0; k < fb.impulse_responses.size(); ++k) {
    if (fb.center_freqs[k] >= 0.8 * 8000.0) continue;  // image interference
    auto mag = stm::frequency_response(fb.impulse_responses[k], 4096);
    size_t best = 0;
    for (size_t i = 1; i < mag.size(); ++i)
      if (mag[i] > mag[best]) best = i;
    INFO("channel " << k << " fc " << fb.center_freqs[k]);
    REQUIRE(std::abs(best * bin - fb.center_freqs[k]) <= bin);
  }
}

TEST_CASE("zero-chirp gammachirp equals the gammatone sample-for-sample") {
  stm::FilterbankSpec gt;
  stm::FilterbankSpec gc;
  gc.kind = stm::FilterKind::gammachirp;
  gc.chirp = 0.0;
  auto a = stm::build_filterbank(gt);
  auto b = stm::build_filterbank(gc);
  for (size_t k = 0; k < a.impulse_responses.size(); ++k)
    for (size_t n = 0; n < a.impulse_responses[k].size(); ++n)
      REQUIRE(std::abs(a.impulse_responses[k][n] -
                       b.impulse_responses[k][n]) <= 1e-12);
}

TEST_CASE("gammachirp peak shift follows c*b_f*ERB(f_k)/p") {
  stm::FilterbankSpec gc;
  gc.kind = stm::FilterKind::gammachirp;  // c = -3.7
  auto fb = stm::build_filterbank(gc);
  for (size_t k = 0; k < fb.impulse_responses.size(); ++k) {
    double fc = fb.center_freqs[k];
    auto pk = stm::measure_response_peak(fb.impulse_responses[k], 16000.0);
    if (fc >= 400.0 && fc <= 6000.0) {
      double predicted =
          fc + gc.chirp * gc.bandwidth_factor *
                   stm::erb_bandwidth(fc / 1000.0) / gc.order;
      INFO("channel " << k << " fc " << fc);
      REQUIRE(pk.freq_hz == Catch::Approx(predicted).epsilon(0.02));
    } else {
      // Low channels: analytic prediction degrades, but the glide still
      // pulls the peak below center.
      REQUIRE(pk.freq_hz < fc);
    }
  }
}

TEST_CASE("negative chirp skews energy below the peak") {
  auto ratio_for = [](double c) {
    stm::FilterbankSpec s;
    s.kind = stm::FilterKind::gammachirp;
    s.chirp = c;
    auto fb = stm::build_filterbank(s);
    const auto& ir = fb.impulse_responses[32];
    auto pk = stm::measure_response_peak(ir, 16000.0);
    auto mag = stm::frequency_response(ir, 65536);
    double below = 0.0, above = 0.0;
    for (size_t i = 0; i < mag.size(); ++i) {
      double f = i * 16000.0 / 65536.0;
      double e = mag[i] * mag[i];
      if (f < pk.freq_hz)
        below += e;
      else if (f > pk.freq_hz)
        above += e;
    }
    return below / above;
  };
  REQUIRE(std::abs(ratio_for(0.0) - 1.0) < 0.01);
  REQUIRE(std::abs(ratio_for(-3.7) - 1.0) > 0.05);
}

TEST_CASE("order-4 gammatone -3 dB bandwidth near 0.887*b_f*ERB") {
  stm::FilterbankSpec s;
  s.num_channels = 1;
  s.f_min = s.f_max = 1000.0;
  auto fb = stm::build_filterbank(s);
  double bw = stm::minus3db_bandwidth(fb.impulse_responses[0], 16000.0);
  double expected = 0.887 * s.bandwidth_factor * stm::erb_bandwidth(1.0);
  REQUIRE(bw == Catch::Approx(expected).epsilon(0.10));
}

TEST_CASE("too-short impulse response is rejected with the channel named") {
  stm::FilterbankSpec s;
  s.ir_length = 256;  // 16 ms; the 60 Hz channel rings far longer
  REQUIRE_THROWS_AS(stm::build_filterbank(s), stm::InvalidArgumentError);
  try {
    stm::build_filterbank(s);
  } catch (const stm::InvalidArgumentError& e) {
    REQUIRE(std::string(e.what()).find("channel 0") != std::string::npos);
  }
}

TEST_CASE("construction is deterministic") {
  stm::FilterbankSpec s;
  s.kind = stm::FilterKind::gammachirp;
  auto a = stm::build_filterbank(s);
  auto b = stm::build_filterbank(s);
  REQUIRE(a.center_freqs == b.center_freqs);
  REQUIRE(a.impulse_responses == b.impulse_responses);
}

TEST_CASE("unit impulse reproduces the impulse responses") {
  auto fb = stm::build_filterbank(small_spec(stm::FilterKind::gammatone));
  stm::AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.assign(600, 0.0);
  clip.samples[0] = 1.0;
  auto y = stm::apply_filterbank(fb, clip);
  for (size_t k = 0; k < y.size(); ++k)
    for (size_t n = 0; n < y[k].size(); ++n)
      REQUIRE(y[k][n] ==
              Catch::Approx(fb.impulse_responses[k][n]).margin(1e-9));
}

TEST_CASE("overlap-save matches direct convolution") {
  auto fb = stm::build_filterbank(small_spec(stm::FilterKind::gammachirp));
  stm::FilterbankApplier applier(fb);
  for (int trial = 0; trial < 5; ++trial) {
    stm::AudioClip clip;
    clip.sample_rate = 16000;
    clip.samples = random_signal(1000, 500 + trial);
    auto pre = applier.prepare(clip.samples);
    for (size_t k = 0; k < fb.impulse_responses.size(); ++k) {
      auto got = applier.apply_channel(pre, k);
      auto want = direct_conv_prefix(clip.samples, fb.impulse_responses[k]);
      double scale = 0.0, err = 0.0;
      for (size_t i = 0; i < want.size(); ++i) {
        scale = std::max(scale, std::abs(want[i]));
        err = std::max(err, std::abs(got[i] - want[i]));
      }
      INFO("trial " << trial << " channel " << k);
      REQUIRE(err <= 1e-6 * std::max(scale, 1e-12));
    }
  }
}

TEST_CASE("application is linear") {
  auto fb = stm::build_filterbank(small_spec(stm::FilterKind::gammatone));
  stm::FilterbankApplier applier(fb);
  auto x1 = random_signal(800, 1);
  auto x2 = random_signal(800, 2);
  const double a = 0.7, b = -1.3;
  stm::AudioClip mix, c1, c2;
  mix.sample_rate = c1.sample_rate = c2.sample_rate = 16000;
  c1.samples = x1;
  c2.samples = x2;
  mix.samples.resize(800);
  for (size_t i = 0; i < 800; ++i) mix.samples[i] = a * x1[i] + b * x2[i];
  auto ym = applier.apply(mix);
  auto y1 = applier.apply(c1);
  auto y2 = applier.apply(c2);
  for (size_t k = 0; k < ym.size(); ++k) {
    double scale = 0.0, err = 0.0;
    for (size_t i = 0; i < ym[k].size(); ++i) {
      double want = a * y1[k][i] + b * y2[k][i];
      scale = std::max(scale, std::abs(want));
      err = std::max(err, std::abs(ym[k][i] - want));
    }
    REQUIRE(err <= 1e-6 * std::max(scale, 1e-12));
  }
}

TEST_CASE("tone at a channel center energizes that channel most") {
  auto fb = stm::build_filterbank(stm::FilterbankSpec{});
  stm::FilterbankApplier applier(fb);
  const size_t j = 32;
  stm::AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.resize(8000);
  for (size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] = std::cos(2.0 * std::numbers::pi * fb.center_freqs[j] *
                               i / 16000.0);
  auto y = applier.apply(clip);
  size_t best = 0;
  double best_rms = -1.0;
  for (size_t k = 0; k < y.size(); ++k) {
    double r = rms(y[k]);
    if (r > best_rms) {
      best_rms = r;
      best = k;
    }
  }
  REQUIRE(best == j);
}

TEST_CASE("zeros in, zeros out; rate mismatch rejected") {
  auto fb = stm::build_filterbank(small_spec(stm::FilterKind::gammatone));
  stm::AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples.assign(500, 0.0);
  auto y = stm::apply_filterbank(fb, clip);
  for (const auto& row : y)
    for (double v : row) REQUIRE(v == 0.0);
  clip.sample_rate = 8000;
  REQUIRE_THROWS_AS(stm::apply_filterbank(fb, clip),
                    stm::InvalidArgumentError);
}
