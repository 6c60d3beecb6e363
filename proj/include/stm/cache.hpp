// include/stm/cache.hpp

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
#include <optional>
#include <string>
#include <vector>

#include "stm/common.hpp"
#include "stm/modulation.hpp"

// On-disk feature cache. One record per (source, frontend, feature kind):
// `<source_id>.<frontend>.<feature_kind>.stmf`, a fixed self-describing
// header followed by row-major little-endian float32 magnitudes. A record
// is only a hit when its pipeline fingerprint matches exactly.

namespace stm {

struct FeatureCacheRecord {
  std::string source_id;
  FeatureKind feature_kind = FeatureKind::stm_global;
  FilterKind frontend = FilterKind::gammatone;
  std::vector<uint32_t> dims;  // (K, M) or (K, M, S)
  std::vector<float> payload;  // row-major
  uint64_t pipeline_fingerprint = 0;
  double source_duration_s = 0.0;

  bool operator==(const FeatureCacheRecord&) const = default;
};

namespace cache_detail {

constexpr char kMagic[9] = "STMFEAT1";
constexpr uint16_t kVersion = 1;

inline std::string record_filename(const std::string& source_id,
                                   FilterKind frontend, FeatureKind kind) {
  return source_id + "." + to_string(frontend) + "." + to_string(kind) +
         ".stmf";
}

}  // namespace cache_detail

inline std::string serialize_record(const FeatureCacheRecord& r) {
  uint64_t expected = 1;
  for (uint32_t d : r.dims) expected *= d;
  if (r.dims.empty() || r.dims.size() > 3 || expected != r.payload.size())
    throw InvalidArgumentError(
        "cache record: payload length does not match dims");
  std::string out(cache_detail::kMagic, 8);
  bytes::put<uint16_t>(out, cache_detail::kVersion);
  bytes::put<uint8_t>(out, r.feature_kind == FeatureKind::stm_global ? 0 : 1);
  bytes::put<uint8_t>(out, r.frontend == FilterKind::gammatone ? 0 : 1);
  bytes::put<uint32_t>(out, static_cast<uint32_t>(r.dims.size()));
  for (size_t i = 0; i < 3; ++i)
    bytes::put<uint32_t>(out, i < r.dims.size() ? r.dims[i] : 1u);
  bytes::put<uint64_t>(out, r.pipeline_fingerprint);
  bytes::put<double>(out, r.source_duration_s);
  bytes::put<uint16_t>(out, static_cast<uint16_t>(r.source_id.size()));
  out += r.source_id;
  bytes::put<uint32_t>(out, static_cast<uint32_t>(r.payload.size()));
  for (float v : r.payload) bytes::put<float>(out, v);
  return out;
}

inline FeatureCacheRecord deserialize_record(const std::string& data,
                                             const std::string& origin) {
  bytes::Reader rd(data);
  if (rd.get_bytes(8) != std::string(cache_detail::kMagic, 8))
    throw FormatError("cache record " + origin + ": bad magic");
  const auto version = rd.get<uint16_t>();
  if (version != cache_detail::kVersion)
    throw FormatError("cache record " + origin + ": unsupported version " +
                      std::to_string(version));
  FeatureCacheRecord r;
  r.feature_kind = rd.get<uint8_t>() == 0 ? FeatureKind::stm_global
                                          : FeatureKind::stm_segmental;
  r.frontend = rd.get<uint8_t>() == 0 ? FilterKind::gammatone
                                      : FilterKind::gammachirp;
  const auto ndims = rd.get<uint32_t>();
  if (ndims < 1 || ndims > 3)
    throw FormatError("cache record " + origin + ": bad rank " +
                      std::to_string(ndims));
  uint32_t dims3[3];
  for (auto& d : dims3) d = rd.get<uint32_t>();
  r.dims.assign(dims3, dims3 + ndims);
  r.pipeline_fingerprint = rd.get<uint64_t>();
  r.source_duration_s = rd.get<double>();
  const auto id_len = rd.get<uint16_t>();
  r.source_id = rd.get_bytes(id_len);
  const auto count = rd.get<uint32_t>();
  uint64_t expected = 1;
  for (uint32_t d : r.dims) expected *= d;
  if (count != expected)
    throw FormatError("cache record " + origin +
                      ": payload count disagrees with dims");
  if (rd.remaining() != static_cast<size_t>(count) * sizeof(float))
    throw FormatError("cache record " + origin + ": payload size mismatch (" +
                      std::to_string(rd.remaining()) + " bytes for " +
                      std::to_string(count) + " values)");
  r.payload.resize(count);
  for (auto& v : r.payload) v = rd.get<float>();
  return r;
}

/// Write a record atomically (temp file, then rename).
inline void cache_put(const FeatureCacheRecord& r, const std::string& store) {
  namespace fs = std::filesystem;
  fs::create_directories(store);
  const auto final_path =
      fs::path(store) / cache_detail::record_filename(
                            r.source_id, r.frontend, r.feature_kind);
  const auto tmp_path =
      fs::path(store) / (final_path.filename().string() + ".tmp" +
                         std::to_string(::getpid()));
  const std::string blob = serialize_record(r);
  {
    std::ofstream f(tmp_path, std::ios::binary | std::ios::trunc);
    if (!f) throw FileError("cache: cannot write " + tmp_path.string());
    f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!f) throw FileError("cache: write failed " + tmp_path.string());
  }
  fs::rename(tmp_path, final_path);
}

/// Fetch a record; absent file or fingerprint mismatch yields nullopt, a
/// corrupt record throws FormatError.
inline std::optional<FeatureCacheRecord> cache_get(
    const std::string& store, const std::string& source_id,
    FeatureKind kind, FilterKind frontend, uint64_t fingerprint) {
  namespace fs = std::filesystem;
  const auto path = fs::path(store) / cache_detail::record_filename(
                                          source_id, frontend, kind);
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::string data((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  auto r = deserialize_record(data, path.string());
  if (r.pipeline_fingerprint != fingerprint) return std::nullopt;
  return r;
}

// ---------------------------------------------------------------------------
// Conversions between StmFeature and cache records.
// ---------------------------------------------------------------------------

inline FeatureCacheRecord record_from_feature(const StmFeature& f,
                                              uint64_t fingerprint) {
  FeatureCacheRecord r;
  r.source_id = f.source_id;
  r.feature_kind = f.kind;
  r.frontend = f.frontend;
  r.dims = {static_cast<uint32_t>(f.num_channels),
            static_cast<uint32_t>(f.num_mod_bins)};
  if (f.kind == FeatureKind::stm_segmental)
    r.dims.push_back(static_cast<uint32_t>(f.num_segments));
  r.payload.assign(f.data.begin(), f.data.end());
  r.pipeline_fingerprint = fingerprint;
  r.source_duration_s = f.source_duration_s;
  return r;
}

inline StmFeature feature_from_record(const FeatureCacheRecord& r) {
  StmFeature f;
  f.kind = r.feature_kind;
  f.frontend = r.frontend;
  f.num_channels = r.dims.size() > 0 ? r.dims[0] : 0;
  f.num_mod_bins = r.dims.size() > 1 ? r.dims[1] : 0;
  f.num_segments = r.dims.size() > 2 ? r.dims[2] : 1;
  f.data.assign(r.payload.begin(), r.payload.end());
  f.spectral_mod_axis =
      mod_detail::centered_axis(f.num_channels, 1.0 / f.num_channels);
  f.temporal_mod_axis = mod_detail::centered_axis(
      f.num_mod_bins, static_cast<double>(kEnvelopeRate) / f.num_mod_bins);
  if (f.kind == FeatureKind::stm_segmental) {
    f.segment_times.resize(f.num_segments);
    for (size_t s = 0; s < f.num_segments; ++s)
      f.segment_times[s] =
          static_cast<double>(s * kSegmentHop) / kEnvelopeRate;
  }
  f.source_id = r.source_id;
  f.source_duration_s = r.source_duration_s;
  return f;
}

}  // namespace stm
