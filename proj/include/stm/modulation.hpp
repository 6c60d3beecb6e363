// include/stm/modulation.hpp

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
#include <string>
#include <vector>

#include "stm/common.hpp"
#include "stm/envelope.hpp"
#include "stm/fft.hpp"

// Spectro-temporal modulation maps: magnitude of the 2-D DFT of the
// auditory spectrogram over (channel, time), DC-centered on both axes.
// The global map uses a fixed 480-frame (3 s) window; the segmental tensor
// stacks 160-frame windows hopped by 80.

namespace stm {

enum class FeatureKind { stm_global, stm_segmental };

inline const char* to_string(FeatureKind k) {
  return k == FeatureKind::stm_global ? "stm_global" : "stm_segmental";
}

constexpr size_t kGlobalFrames = 480;   // 3 s at 160 Hz
constexpr size_t kSegmentFrames = 160;  // 1 s
constexpr size_t kSegmentHop = 80;      // 50% overlap

/// Magnitude modulation map(s) plus axis metadata. data is row-major over
/// (channel, temporal bin[, segment]).
struct StmFeature {
  FeatureKind kind = FeatureKind::stm_global;
  FilterKind frontend = FilterKind::gammatone;
  size_t num_channels = 0;   // K
  size_t num_mod_bins = 0;   // M
  size_t num_segments = 1;   // S (1 for global)
  std::vector<double> data;  // K*M*S magnitudes, all >= 0
  std::vector<double> spectral_mod_axis;  // cycles per channel index
  std::vector<double> temporal_mod_axis;  // Hz, [-rate/2, rate/2)
  std::vector<double> segment_times;      // s, segmental only
  std::string source_id;
  double source_duration_s = 0.0;  // before the fixed-length fit

  double at(size_t k, size_t m, size_t s = 0) const {
    return data[(k * num_mod_bins + m) * num_segments + s];
  }
  size_t size() const { return num_channels * num_mod_bins * num_segments; }
};

namespace mod_detail {

/// |2D-DFT| of a K x M matrix, fftshifted so DC sits at (K/2, M/2).
inline std::vector<double> magnitude_2d(
    const std::vector<std::vector<double>>& rows, size_t K, size_t M,
    size_t col_offset) {
  std::vector<fft::cplx> grid(K * M);
  auto row_plan = fft::Plan::get(M);
  std::vector<fft::cplx> rbuf(M);
  for (size_t k = 0; k < K; ++k) {
    for (size_t m = 0; m < M; ++m) rbuf[m] = rows[k][col_offset + m];
    row_plan->forward(rbuf.data());
    for (size_t m = 0; m < M; ++m) grid[k * M + m] = rbuf[m];
  }
  auto col_plan = fft::Plan::get(K);
  std::vector<fft::cplx> cbuf(K);
  std::vector<double> mag(K * M);
  for (size_t m = 0; m < M; ++m) {
    for (size_t k = 0; k < K; ++k) cbuf[k] = grid[k * M + m];
    col_plan->forward(cbuf.data());
    for (size_t k = 0; k < K; ++k) {
      const size_t ks = (k + K / 2) % K;  // fftshift
      const size_t ms = (m + M / 2) % M;
      mag[ks * M + ms] = std::abs(cbuf[k]);
    }
  }
  return mag;
}

inline std::vector<double> centered_axis(size_t n, double step) {
  std::vector<double> axis(n);
  for (size_t i = 0; i < n; ++i)
    axis[i] = (static_cast<double>(i) - static_cast<double>(n / 2)) * step;
  return axis;
}

}  // namespace mod_detail

/// Fit the envelope matrix to exactly `frames` time samples: truncate longer
/// input, zero-pad shorter input at the tail.
inline std::vector<std::vector<double>> fit_frames(
    const std::vector<std::vector<double>>& rows, size_t frames) {
  std::vector<std::vector<double>> out(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    out[k].assign(frames, 0.0);
    const size_t n = std::min(frames, rows[k].size());
    std::copy(rows[k].begin(), rows[k].begin() + n, out[k].begin());
  }
  return out;
}

/// Utterance-level map: the envelope matrix fitted to `frames` columns,
/// then |2D-DFT| over (channel, time).
inline StmFeature stm_global(const AuditorySpectrogram& sg,
                             FilterKind frontend,
                             size_t frames = kGlobalFrames) {
  if (sg.values.empty() || sg.frames() == 0)
    throw InvalidArgumentError("stm_global: empty spectrogram");
  const size_t K = sg.channels();
  auto fitted = fit_frames(sg.values, frames);
  StmFeature f;
  f.kind = FeatureKind::stm_global;
  f.frontend = frontend;
  f.num_channels = K;
  f.num_mod_bins = frames;
  f.num_segments = 1;
  f.data = mod_detail::magnitude_2d(fitted, K, frames, 0);
  f.spectral_mod_axis = mod_detail::centered_axis(K, 1.0 / K);
  f.temporal_mod_axis = mod_detail::centered_axis(
      frames, static_cast<double>(sg.envelope_rate) / frames);
  f.source_id = sg.source_id;
  f.source_duration_s =
      static_cast<double>(sg.frames()) / sg.envelope_rate;
  return f;
}

/// Segment-level tensor: 1 s windows with 50% overlap, each transformed
/// independently, stacked in time order.
inline StmFeature stm_segmental(const AuditorySpectrogram& sg,
                                FilterKind frontend,
                                size_t seg_frames = kSegmentFrames,
                                size_t hop = kSegmentHop) {
  if (sg.values.empty() || sg.frames() == 0)
    throw InvalidArgumentError("stm_segmental: empty spectrogram");
  const size_t N = sg.frames();
  if (N < seg_frames)
    throw InvalidArgumentError(
        "stm_segmental: clip shorter than one segment (" +
        std::to_string(N) + " < " + std::to_string(seg_frames) + " frames)");
  const size_t K = sg.channels();
  const size_t S = (N - seg_frames) / hop + 1;

  StmFeature f;
  f.kind = FeatureKind::stm_segmental;
  f.frontend = frontend;
  f.num_channels = K;
  f.num_mod_bins = seg_frames;
  f.num_segments = S;
  f.data.resize(K * seg_frames * S);
  f.segment_times.resize(S);
  for (size_t s = 0; s < S; ++s) {
    auto mag = mod_detail::magnitude_2d(sg.values, K, seg_frames, s * hop);
    for (size_t k = 0; k < K; ++k)
      for (size_t m = 0; m < seg_frames; ++m)
        f.data[(k * seg_frames + m) * S + s] = mag[k * seg_frames + m];
    f.segment_times[s] =
        static_cast<double>(s * hop) / sg.envelope_rate;
  }
  f.spectral_mod_axis = mod_detail::centered_axis(K, 1.0 / K);
  f.temporal_mod_axis = mod_detail::centered_axis(
      seg_frames, static_cast<double>(sg.envelope_rate) / seg_frames);
  f.source_id = sg.source_id;
  f.source_duration_s = static_cast<double>(N) / sg.envelope_rate;
  return f;
}

// ---------------------------------------------------------------------------
// Flattening and z-score standardization (fit on the training subset only).
// ---------------------------------------------------------------------------

struct FeatureVector {
  std::vector<double> values;
  std::string source_id;
  std::string standardization_id;  // id of the stats that produced values
};

/// Per-dimension mean and population standard deviation of a training set.
/// Zero-variance dimensions transform to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;

  /// Content-derived identifier of the fitted statistics.
  std::string id() const {
    uint64_t h = fnv1a64(mean.data(), mean.size() * sizeof(double));
    h = fnv1a64(std.data(), std.size() * sizeof(double), h);
    return hex64(h);
  }

  void fit(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
      throw InvalidArgumentError("standardizer: empty training subset");
    const size_t d = rows[0].size();
    mean.assign(d, 0.0);
    std.assign(d, 0.0);
    for (const auto& r : rows) {
      if (r.size() != d)
        throw InvalidArgumentError("standardizer: dimension mismatch");
      for (size_t j = 0; j < d; ++j) mean[j] += r[j];
    }
    for (double& m : mean) m /= rows.size();
    for (const auto& r : rows)
      for (size_t j = 0; j < d; ++j) {
        const double c = r[j] - mean[j];
        std[j] += c * c;
      }
    for (double& s : std) s = std::sqrt(s / rows.size());
  }

  std::vector<double> transform(const std::vector<double>& x) const {
    if (x.size() != mean.size())
      throw InvalidArgumentError("standardizer: dimension mismatch");
    std::vector<double> out(x.size());
    for (size_t j = 0; j < x.size(); ++j)
      out[j] = std[j] > 0.0 ? (x[j] - mean[j]) / std[j] : 0.0;
    return out;
  }
};

/// Row-major flattening of the (K, M, S) magnitudes.
inline std::vector<double> flatten(const StmFeature& f) { return f.data; }

/// Flatten all features and z-score them with statistics fitted on the
/// training subset only.
inline std::pair<std::vector<FeatureVector>, Standardizer> flatten_standardize(
    const std::vector<StmFeature>& features,
    const std::vector<size_t>& fit_on) {
  if (features.empty())
    throw InvalidArgumentError("flatten_standardize: no features");
  if (fit_on.empty())
    throw InvalidArgumentError("flatten_standardize: empty training subset");
  const size_t d = features[0].size();
  for (const auto& f : features) {
    if (f.size() != d || f.kind != features[0].kind ||
        f.frontend != features[0].frontend ||
        f.num_channels != features[0].num_channels ||
        f.num_mod_bins != features[0].num_mod_bins ||
        f.num_segments != features[0].num_segments)
      throw InvalidArgumentError(
          "flatten_standardize: features disagree in kind or dims");
  }
  std::vector<std::vector<double>> train;
  train.reserve(fit_on.size());
  for (size_t idx : fit_on) {
    if (idx >= features.size())
      throw InvalidArgumentError("flatten_standardize: bad training index");
    train.push_back(flatten(features[idx]));
  }
  Standardizer st;
  st.fit(train);
  const std::string stats_id = st.id();
  std::vector<FeatureVector> out(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    out[i].values = st.transform(flatten(features[i]));
    out[i].source_id = features[i].source_id;
    out[i].standardization_id = stats_id;
  }
  return {std::move(out), std::move(st)};
}

}  // namespace stm
