// include/stm/pipeline.hpp

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

#include <cstdio>
#include <memory>
#include <mutex>
#include <string>

#include "stm/audio.hpp"
#include "stm/cache.hpp"
#include "stm/envelope.hpp"
#include "stm/filterbank.hpp"
#include "stm/manifest.hpp"
#include "stm/modulation.hpp"

// End-to-end feature extraction for one clip: audio -> filterbank ->
// envelope -> fixed 480-frame fit -> global map or segmental tensor.
// Every parameter that shapes a feature goes into the pipeline fingerprint;
// cached records are valid only under an exact fingerprint match.

namespace stm {

struct ExtractionConfig {
  FilterbankSpec filterbank;  // `kind` is overridden per frontend
  double envelope_cutoff_hz = kEnvelopeCutoffHz;
  int envelope_rate = kEnvelopeRate;
  size_t global_frames = kGlobalFrames;
  size_t segment_frames = kSegmentFrames;
  size_t segment_hop = kSegmentHop;

  int sample_rate() const { return filterbank.sample_rate; }
};

namespace pipeline_detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace pipeline_detail

/// Hash of every extraction parameter for one (frontend, feature) lane.
inline uint64_t pipeline_fingerprint(const ExtractionConfig& cfg,
                                     FilterKind frontend, FeatureKind kind) {
  using pipeline_detail::fmt_double;
  FilterbankSpec fb = cfg.filterbank;
  fb.kind = frontend;
  std::string s = "stmf-v1";
  s += "|sr=" + std::to_string(fb.sample_rate);
  s += "|fb=" + std::string(to_string(frontend));
  s += "|K=" + std::to_string(fb.num_channels);
  s += "|fmin=" + fmt_double(fb.f_min);
  s += "|fmax=" + fmt_double(fb.f_max);
  s += "|p=" + std::to_string(fb.order);
  s += "|bf=" + fmt_double(fb.bandwidth_factor);
  s += "|c=" + fmt_double(fb.effective_chirp());
  s += "|ir=" + std::to_string(fb.ir_length);
  s += "|lpf=butter4zp@" + fmt_double(cfg.envelope_cutoff_hz);
  s += "|rate=" + std::to_string(cfg.envelope_rate);
  s += "|fit=" + std::to_string(cfg.global_frames);
  s += "|seg=" + std::to_string(cfg.segment_frames) + "/" +
       std::to_string(cfg.segment_hop);
  s += "|kind=" + std::string(to_string(kind));
  return fnv1a64(s);
}

/// Shared per-run extraction state: filterbanks are built lazily, once per
/// frontend, and shared by all worker threads.
class Extractor {
 public:
  explicit Extractor(ExtractionConfig cfg) : cfg_(std::move(cfg)) {}

  const ExtractionConfig& config() const { return cfg_; }

  uint64_t fingerprint(FilterKind frontend, FeatureKind kind) const {
    return pipeline_fingerprint(cfg_, frontend, kind);
  }

  const FilterbankApplier& applier(FilterKind frontend) const {
    const int slot = frontend == FilterKind::gammatone ? 0 : 1;
    std::call_once(built_[slot], [&] {
      FilterbankSpec spec = cfg_.filterbank;
      spec.kind = frontend;
      appliers_[slot] =
          std::make_unique<FilterbankApplier>(build_filterbank(spec));
    });
    return *appliers_[slot];
  }

  AuditorySpectrogram spectrogram(FilterKind frontend,
                                  const AudioClip& clip) const {
    AuditorySpectrogram sg;
    const auto& ap = applier(frontend);
    const auto& fb = ap.filterbank();
    if (clip.sample_rate != fb.spec.sample_rate)
      throw InvalidArgumentError("extractor: clip rate mismatch");
    sg.channel_freqs = fb.center_freqs;
    sg.source_id = clip.source_id;
    sg.envelope_rate = cfg_.envelope_rate;
    sg.values.resize(fb.center_freqs.size());
    auto pre = ap.prepare(clip.samples);
    for (size_t k = 0; k < sg.values.size(); ++k) {
      auto subband = ap.apply_channel(pre, k);
      auto env = power_envelope(subband, clip.sample_rate,
                                cfg_.envelope_cutoff_hz);
      auto row = resample_poly(env, cfg_.envelope_rate, clip.sample_rate);
      for (double& v : row) v = std::max(v, 0.0);
      sg.values[k] = std::move(row);
    }
    return sg;
  }

  /// Feature under the fixed-length policy: the envelope is fitted to
  /// global_frames before either transform, so segmental S is constant.
  StmFeature extract(FilterKind frontend, FeatureKind kind,
                     const AuditorySpectrogram& sg) const {
    AuditorySpectrogram fitted;
    fitted.values = fit_frames(sg.values, cfg_.global_frames);
    fitted.envelope_rate = sg.envelope_rate;
    fitted.channel_freqs = sg.channel_freqs;
    fitted.source_id = sg.source_id;
    StmFeature f =
        kind == FeatureKind::stm_global
            ? stm_global(fitted, frontend, cfg_.global_frames)
            : stm_segmental(fitted, frontend, cfg_.segment_frames,
                            cfg_.segment_hop);
    f.source_duration_s =
        static_cast<double>(sg.frames()) / sg.envelope_rate;
    return f;
  }

  StmFeature extract(FilterKind frontend, FeatureKind kind,
                     const AudioClip& clip) const {
    return extract(frontend, kind, spectrogram(frontend, clip));
  }

 private:
  ExtractionConfig cfg_;
  mutable std::once_flag built_[2];
  mutable std::unique_ptr<FilterbankApplier> appliers_[2];
};

/// Cache-aware extraction for one manifest entry. Returns the feature and
/// whether it came from the cache.
inline StmFeature extract_cached(const Extractor& ex, FilterKind frontend,
                                 FeatureKind kind, const ManifestEntry& entry,
                                 const std::string& cache_dir,
                                 bool* was_hit = nullptr) {
  const uint64_t fp = ex.fingerprint(frontend, kind);
  const std::string sid = entry.source_id();
  if (auto rec = cache_get(cache_dir, sid, kind, frontend, fp)) {
    if (was_hit) *was_hit = true;
    return feature_from_record(*rec);
  }
  if (was_hit) *was_hit = false;
  auto clip = load_audio(entry.path, ex.config().sample_rate());
  clip.source_id = sid;
  auto feature = ex.extract(frontend, kind, clip);
  cache_put(record_from_feature(feature, fp), cache_dir);
  // Round through the float32 cache encoding so cold and warm runs produce
  // bit-identical downstream numbers.
  for (double& v : feature.data) v = static_cast<float>(v);
  return feature;
}

}  // namespace stm
