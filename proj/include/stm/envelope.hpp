// include/stm/envelope.hpp

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

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "stm/common.hpp"
#include "stm/fft.hpp"
#include "stm/filterbank.hpp"
#include "stm/resample.hpp"

// Subband signal -> Hilbert power envelope -> 64 Hz low-pass -> 160 Hz
// envelope rate. Rows over all channels form the auditory spectrogram.

namespace stm {

constexpr double kEnvelopeCutoffHz = 64.0;
constexpr int kEnvelopeRate = 160;

/// K x N power-envelope matrix at the envelope rate.
struct AuditorySpectrogram {
  std::vector<std::vector<double>> values;  // K rows, all entries >= 0
  int envelope_rate = kEnvelopeRate;
  std::vector<double> channel_freqs;
  std::string source_id;

  size_t channels() const { return values.size(); }
  size_t frames() const { return values.empty() ? 0 : values[0].size(); }
};

/// Analytic signal via the full-length FFT construction: zero the negative
/// frequencies, double the positive ones.
inline std::vector<fft::cplx> analytic_signal(std::span<const double> x) {
  const size_t n = x.size();
  if (n == 0) throw InvalidArgumentError("analytic_signal: empty input");
  std::vector<fft::cplx> buf(n);
  for (size_t i = 0; i < n; ++i) buf[i] = fft::cplx(x[i], 0.0);
  if (n == 1) return buf;
  auto plan = fft::Plan::get(n);
  plan->forward(buf.data());
  const size_t half = n / 2;
  if (n % 2 == 0) {
    for (size_t k = 1; k < half; ++k) buf[k] *= 2.0;
    for (size_t k = half + 1; k < n; ++k) buf[k] = 0.0;
  } else {
    for (size_t k = 1; k <= half; ++k) buf[k] *= 2.0;
    for (size_t k = half + 1; k < n; ++k) buf[k] = 0.0;
  }
  plan->inverse(buf.data());
  return buf;
}

// ---------------------------------------------------------------------------
// Butterworth low-pass as second-order sections, run zero-phase.
// ---------------------------------------------------------------------------

struct Biquad {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator (a0 == 1)
};

/// Bilinear-transform Butterworth low-pass of even order.
inline std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz,
                                               double sample_rate) {
  if (order < 2 || order % 2 != 0)
    throw InvalidArgumentError("butterworth_lowpass: even order >= 2");
  if (!(0.0 < cutoff_hz && cutoff_hz < sample_rate / 2.0))
    throw InvalidArgumentError("butterworth_lowpass: cutoff out of range");
  const double warped =
      2.0 * sample_rate *
      std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  std::vector<Biquad> sos;
  for (int k = 0; k < order / 2; ++k) {
    // Conjugate analog pole pair on the Butterworth circle.
    const double theta =
        std::numbers::pi * (2.0 * k + 1.0 + order) / (2.0 * order);
    const double re = warped * std::cos(theta);
    const double im = warped * std::sin(theta);
    // Bilinear transform of s^2 - 2*re*s + (re^2+im^2) with fs2 = 2*Fs.
    const double fs2 = 2.0 * sample_rate;
    const double a0 = fs2 * fs2 - 2.0 * re * fs2 + (re * re + im * im);
    const double a1 = 2.0 * (re * re + im * im) - 2.0 * fs2 * fs2;
    const double a2 = fs2 * fs2 + 2.0 * re * fs2 + (re * re + im * im);
    // Numerator (1 + z^-1)^2 scaled for unit DC gain.
    const double gain = (a0 + a1 + a2) / 4.0;
    sos.push_back(Biquad{gain / a0, 2.0 * gain / a0, gain / a0, a1 / a0,
                         a2 / a0});
  }
  return sos;
}

namespace env_detail {

/// Steady-state DF2T state for a unit-step input, scipy-style initial
/// conditions for transient-free filtering of signals with a DC offset.
inline void step_state(const Biquad& q, double* z1, double* z2) {
  const double y = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
  *z2 = q.b2 - q.a2 * y;
  *z1 = q.b1 - q.a1 * y + *z2;
}

inline void sos_forward(const std::vector<Biquad>& sos,
                        std::vector<double>& x) {
  for (const auto& q : sos) {
    double z1, z2;
    step_state(q, &z1, &z2);
    z1 *= x.empty() ? 0.0 : x[0];
    z2 *= x.empty() ? 0.0 : x[0];
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
}

}  // namespace env_detail

/// Forward-backward (zero-phase) filtering with odd-reflection padding.
inline std::vector<double> filtfilt(const std::vector<Biquad>& sos,
                                    std::span<const double> x,
                                    size_t pad_len) {
  if (x.empty()) return {};
  const size_t n = x.size();
  pad_len = std::min(pad_len, n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad_len);
  for (size_t i = 0; i < pad_len; ++i)
    ext.push_back(2.0 * x[0] - x[pad_len - i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (size_t i = 0; i < pad_len; ++i)
    ext.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

  env_detail::sos_forward(sos, ext);
  std::reverse(ext.begin(), ext.end());
  env_detail::sos_forward(sos, ext);
  std::reverse(ext.begin(), ext.end());
  return std::vector<double>(ext.begin() + pad_len,
                             ext.begin() + pad_len + n);
}

/// Hilbert power envelope of one subband: LPF(|y + j*Hilbert(y)|^2),
/// clamped non-negative (zero-phase filtering can ring slightly below 0).
inline std::vector<double> power_envelope(std::span<const double> y,
                                          double sample_rate,
                                          double cutoff_hz = kEnvelopeCutoffHz) {
  if (y.empty()) throw InvalidArgumentError("power_envelope: empty input");
  auto a = analytic_signal(y);
  std::vector<double> p(a.size());
  for (size_t i = 0; i < a.size(); ++i) p[i] = std::norm(a[i]);
  auto sos = butterworth_lowpass(4, cutoff_hz, sample_rate);
  const size_t pad = static_cast<size_t>(
      std::lround(3.0 * sample_rate / cutoff_hz));
  auto e = filtfilt(sos, p, pad);
  for (double& v : e) v = std::max(v, 0.0);
  return e;
}

/// Band-limited decimation of a low-passed envelope to the envelope rate.
inline std::vector<double> resample_envelope(std::span<const double> e,
                                             int sample_rate,
                                             int target_rate = kEnvelopeRate) {
  if (target_rate >= sample_rate)
    throw InvalidArgumentError(
        "resample_envelope: target rate must be below the source rate");
  return resample_poly(e, target_rate, sample_rate);
}

/// Full cochlear stage: subbands -> power envelopes -> 160 Hz rows.
inline AuditorySpectrogram auditory_spectrogram(
    const FilterbankApplier& applier, const AudioClip& clip) {
  const auto& fb = applier.filterbank();
  if (clip.sample_rate != fb.spec.sample_rate)
    throw InvalidArgumentError("auditory_spectrogram: sample-rate mismatch");
  AuditorySpectrogram out;
  out.channel_freqs = fb.center_freqs;
  out.source_id = clip.source_id;
  out.values.resize(fb.center_freqs.size());
  auto pre = applier.prepare(clip.samples);
  for (size_t k = 0; k < out.values.size(); ++k) {
    auto subband = applier.apply_channel(pre, k);
    auto env = power_envelope(subband, clip.sample_rate);
    auto row = resample_envelope(env, clip.sample_rate, kEnvelopeRate);
    // The decimator's sinc can undershoot; power stays non-negative.
    for (double& v : row) v = std::max(v, 0.0);
    out.values[k] = std::move(row);
  }
  return out;
}

inline AuditorySpectrogram auditory_spectrogram(const AuditoryFilterbank& fb,
                                                const AudioClip& clip) {
  return auditory_spectrogram(FilterbankApplier(fb), clip);
}

}  // namespace stm
