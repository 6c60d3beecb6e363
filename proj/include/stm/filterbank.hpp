// include/stm/filterbank.hpp

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
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "stm/audio.hpp"
#include "stm/common.hpp"
#include "stm/erb.hpp"
#include "stm/fft.hpp"

// Gammatone / gammachirp FIR filterbanks on the ERB-number scale, applied by
// FFT overlap-save convolution.

namespace stm {

enum class FilterKind { gammatone, gammachirp };

inline const char* to_string(FilterKind k) {
  return k == FilterKind::gammatone ? "gtfb" : "gcfb";
}

struct FilterbankSpec {
  FilterKind kind = FilterKind::gammatone;
  int num_channels = 64;
  double f_min = 60.0;
  double f_max = 7600.0;
  int order = 4;                    // gamma envelope order p
  double bandwidth_factor = 1.019;  // ERB multiplier b_f
  double chirp = -3.7;              // log-glide coefficient c, gammachirp only
  int sample_rate = kPipelineRate;
  int ir_length = 4096;

  /// Effective chirp coefficient: gammatone is the zero-chirp case.
  double effective_chirp() const {
    return kind == FilterKind::gammachirp ? chirp : 0.0;
  }

  void validate() const {
    if (sample_rate <= 0)
      throw InvalidArgumentError("filterbank: sample_rate must be positive");
    const bool range_ok = num_channels == 1 ? f_min <= f_max : f_min < f_max;
    if (!(0.0 < f_min && range_ok && f_max < sample_rate / 2.0))
      throw InvalidArgumentError(
          "filterbank: need 0 < f_min < f_max < sample_rate/2");
    if (num_channels < 1)
      throw InvalidArgumentError("filterbank: need at least one channel");
    if (order < 1) throw InvalidArgumentError("filterbank: order must be >= 1");
    if (bandwidth_factor <= 0.0)
      throw InvalidArgumentError("filterbank: bandwidth_factor must be > 0");
    if (ir_length <= order)
      throw InvalidArgumentError("filterbank: ir_length too short");
  }
};

struct AuditoryFilterbank {
  FilterbankSpec spec;
  std::vector<double> center_freqs;                 // Hz, strictly increasing
  std::vector<std::vector<double>> impulse_responses;  // peak-gain normalized
};

/// |DTFT| of a real sequence at one frequency.
inline double dtft_magnitude(std::span<const double> x, double f_hz,
                             double sample_rate) {
  double re = 0.0, im = 0.0;
  const double w = 2.0 * std::numbers::pi * f_hz / sample_rate;
  // Recurrence for cos/sin avoids n trig calls.
  const double cw = std::cos(w), sw = std::sin(w);
  double c = 1.0, s = 0.0;
  for (double v : x) {
    re += v * c;
    im -= v * s;
    const double c2 = c * cw - s * sw;
    s = s * cw + c * sw;
    c = c2;
  }
  return std::hypot(re, im);
}

/// Magnitude response on the FFT grid: bins 0..nfft/2 inclusive.
inline std::vector<double> frequency_response(std::span<const double> ir,
                                              size_t nfft) {
  std::vector<fft::cplx> buf(nfft, fft::cplx(0.0, 0.0));
  for (size_t i = 0; i < ir.size() && i < nfft; ++i) buf[i] = ir[i];
  fft::Plan::get(nfft)->forward(buf.data());
  std::vector<double> mag(nfft / 2 + 1);
  for (size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

struct PeakMeasurement {
  double freq_hz;
  double magnitude;
};

/// Locate the magnitude-response peak: coarse FFT bracket, then a ternary
/// refinement on the continuous DTFT.
inline PeakMeasurement measure_response_peak(std::span<const double> ir,
                                             double sample_rate,
                                             size_t nfft = 8192) {
  auto mag = frequency_response(ir, nfft);
  size_t best = 0;
  for (size_t k = 1; k < mag.size(); ++k)
    if (mag[k] > mag[best]) best = k;
  const double bin = sample_rate / static_cast<double>(nfft);
  double lo = std::max(0.0, (static_cast<double>(best) - 1.5) * bin);
  double hi = std::min(sample_rate / 2.0,
                       (static_cast<double>(best) + 1.5) * bin);
  for (int it = 0; it < 80; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (dtft_magnitude(ir, m1, sample_rate) <
        dtft_magnitude(ir, m2, sample_rate))
      lo = m1;
    else
      hi = m2;
  }
  const double fp = 0.5 * (lo + hi);
  return {fp, dtft_magnitude(ir, fp, sample_rate)};
}

/// -3 dB bandwidth around the measured peak, by bisection on each side.
inline double minus3db_bandwidth(std::span<const double> ir,
                                 double sample_rate) {
  const auto peak = measure_response_peak(ir, sample_rate);
  const double target = peak.magnitude / std::numbers::sqrt2;
  auto edge = [&](double lo, double hi, bool rising) {
    // rising: magnitude goes below->above target as f increases.
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      bool above = dtft_magnitude(ir, mid, sample_rate) > target;
      if (above == rising)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double f_lo = edge(0.0, peak.freq_hz, true);
  const double f_hi = edge(peak.freq_hz, sample_rate / 2.0, false);
  return f_hi - f_lo;
}

/// Build the K-channel filterbank. Impulse responses follow the gamma
/// envelope (n*Ts)^(p-1) * exp(-2*pi*b_f*ERB(f_k)*n*Ts) with carrier
/// cos(2*pi*f_k*n*Ts + c*ln(n*Ts)); the n = 0 sample is zero, which also
/// sidesteps ln(0). Each channel is normalized to unit peak frequency
/// response.
inline AuditoryFilterbank build_filterbank(const FilterbankSpec& spec) {
  spec.validate();
  AuditoryFilterbank fb;
  fb.spec = spec;
  fb.center_freqs = erb_space(spec.f_min, spec.f_max, spec.num_channels);
  fb.impulse_responses.resize(spec.num_channels);

  const double ts = 1.0 / spec.sample_rate;
  const double c = spec.effective_chirp();
  for (int k = 0; k < spec.num_channels; ++k) {
    const double fk = fb.center_freqs[k];
    const double lambda =
        2.0 * std::numbers::pi * spec.bandwidth_factor *
        erb_bandwidth(fk / 1000.0);

    // Truncation check on the analytic gamma envelope.
    const double t_end = (spec.ir_length - 1) * ts;
    const double t_peak = std::max(ts, (spec.order - 1) / lambda);
    auto env_log = [&](double t) {
      return (spec.order - 1) * std::log(t) - lambda * t;
    };
    const double drop_db =
        (env_log(t_end) - env_log(t_peak)) * 20.0 / std::numbers::ln10;
    if (drop_db > -60.0)
      throw InvalidArgumentError(
          "filterbank: ir_length " + std::to_string(spec.ir_length) +
          " leaves channel " + std::to_string(k) + " (" + std::to_string(fk) +
          " Hz) only " + std::to_string(-drop_db) +
          " dB down at truncation; lengthen the impulse response");

    std::vector<double> ir(spec.ir_length, 0.0);
    for (int n = 1; n < spec.ir_length; ++n) {
      const double t = n * ts;
      const double env =
          std::pow(t, spec.order - 1) * std::exp(-lambda * t);
      const double phase =
          2.0 * std::numbers::pi * fk * t + c * std::log(t);
      ir[n] = env * std::cos(phase);
    }
    const auto peak = measure_response_peak(ir, spec.sample_rate);
    if (!(peak.magnitude > 0.0))
      throw InvalidArgumentError("filterbank: degenerate channel " +
                                 std::to_string(k));
    const double gain = 1.0 / peak.magnitude;
    for (double& v : ir) v *= gain;
    fb.impulse_responses[k] = std::move(ir);
  }
  return fb;
}

// ---------------------------------------------------------------------------
// Overlap-save application.
// ---------------------------------------------------------------------------

class FilterbankApplier {
 public:
  explicit FilterbankApplier(AuditoryFilterbank fb) : fb_(std::move(fb)) {
    const size_t ir_len = static_cast<size_t>(fb_.spec.ir_length);
    nfft_ = 1;
    while (nfft_ < 4 * ir_len) nfft_ <<= 1;
    step_ = nfft_ - ir_len + 1;
    plan_ = fft::Plan::get(nfft_);
    ir_fft_.resize(fb_.impulse_responses.size());
    for (size_t k = 0; k < ir_fft_.size(); ++k) {
      std::vector<fft::cplx> h(nfft_, fft::cplx(0.0, 0.0));
      for (size_t i = 0; i < ir_len; ++i) h[i] = fb_.impulse_responses[k][i];
      plan_->forward(h.data());
      ir_fft_[k] = std::move(h);
    }
  }

  const AuditoryFilterbank& filterbank() const { return fb_; }

  /// Forward FFTs of the overlap-save input blocks, shared by all channels.
  struct BlockFfts {
    size_t input_len = 0;
    std::vector<std::vector<fft::cplx>> blocks;
  };

  BlockFfts prepare(std::span<const double> x) const {
    if (x.empty())
      throw InvalidArgumentError("apply_filterbank: empty input");
    const size_t ir_len = static_cast<size_t>(fb_.spec.ir_length);
    BlockFfts out;
    out.input_len = x.size();
    const size_t n_blocks = (x.size() + step_ - 1) / step_;
    out.blocks.resize(n_blocks);
    for (size_t b = 0; b < n_blocks; ++b) {
      std::vector<fft::cplx> buf(nfft_, fft::cplx(0.0, 0.0));
      // Block covers padded positions [b*step - (L-1), b*step + step).
      const int64_t start =
          static_cast<int64_t>(b * step_) - static_cast<int64_t>(ir_len - 1);
      for (size_t i = 0; i < nfft_; ++i) {
        const int64_t src = start + static_cast<int64_t>(i);
        if (src >= 0 && src < static_cast<int64_t>(x.size()))
          buf[i] = x[static_cast<size_t>(src)];
      }
      plan_->forward(buf.data());
      out.blocks[b] = std::move(buf);
    }
    return out;
  }

  /// Subband k: linear convolution with channel k's impulse response,
  /// truncated to the input length.
  std::vector<double> apply_channel(const BlockFfts& pre, size_t k) const {
    const size_t ir_len = static_cast<size_t>(fb_.spec.ir_length);
    std::vector<double> y(pre.input_len, 0.0);
    std::vector<fft::cplx> buf(nfft_);
    for (size_t b = 0; b < pre.blocks.size(); ++b) {
      const auto& blk = pre.blocks[b];
      for (size_t i = 0; i < nfft_; ++i) buf[i] = blk[i] * ir_fft_[k][i];
      plan_->inverse(buf.data());
      const size_t out_start = b * step_;
      const size_t count = std::min(step_, pre.input_len - out_start);
      for (size_t i = 0; i < count; ++i)
        y[out_start + i] = buf[ir_len - 1 + i].real();
    }
    return y;
  }

  std::vector<std::vector<double>> apply(const AudioClip& clip) const {
    if (clip.sample_rate != fb_.spec.sample_rate)
      throw InvalidArgumentError(
          "apply_filterbank: clip rate " + std::to_string(clip.sample_rate) +
          " != filterbank rate " + std::to_string(fb_.spec.sample_rate));
    auto pre = prepare(clip.samples);
    std::vector<std::vector<double>> out(fb_.impulse_responses.size());
    for (size_t k = 0; k < out.size(); ++k) out[k] = apply_channel(pre, k);
    return out;
  }

 private:
  AuditoryFilterbank fb_;
  size_t nfft_ = 0;
  size_t step_ = 0;
  std::shared_ptr<const fft::Plan> plan_;
  std::vector<std::vector<fft::cplx>> ir_fft_;
};

/// One-shot convenience; construct a FilterbankApplier directly when
/// processing many clips with the same bank.
inline std::vector<std::vector<double>> apply_filterbank(
    const AuditoryFilterbank& fb, const AudioClip& clip) {
  return FilterbankApplier(fb).apply(clip);
}

}  // namespace stm
