// tests/test_cache.cpp

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

#include "stm/cache.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;

namespace {

struct TempStore {
  fs::path dir;
  TempStore() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("stm_cache_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~TempStore() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string str() const { return dir.string(); }
};

stm::FeatureCacheRecord sample_record() {
  stm::FeatureCacheRecord r;
  r.source_id = "clip-42";
  r.feature_kind = stm::FeatureKind::stm_segmental;
  r.frontend = stm::FilterKind::gammachirp;
  r.dims = {4, 8, 3};
  r.payload.resize(4 * 8 * 3);
  std::mt19937 rng(5);
  for (auto& v : r.payload)
    v = static_cast<float>(rng() % 1000) / 7.0f;
  r.pipeline_fingerprint = 0xdeadbeefcafef00dull;
  r.source_duration_s = 3.25;
  return r;
}

}  // namespace

TEST_CASE("put then get round-trips bit-exactly") {
  TempStore store;
  auto r = sample_record();
  stm::cache_put(r, store.str());
  auto got = stm::cache_get(store.str(), r.source_id, r.feature_kind,
                            r.frontend, r.pipeline_fingerprint);
  REQUIRE(got.has_value());
  REQUIRE(*got == r);
}

TEST_CASE("fingerprint mismatch reads as absent") {
  TempStore store;
  auto r = sample_record();
  stm::cache_put(r, store.str());
  auto got = stm::cache_get(store.str(), r.source_id, r.feature_kind,
                            r.frontend, r.pipeline_fingerprint + 1);
  REQUIRE_FALSE(got.has_value());
  REQUIRE_FALSE(stm::cache_get(store.str(), "other-id", r.feature_kind,
                               r.frontend, r.pipeline_fingerprint)
                    .has_value());
}

TEST_CASE("dims must multiply out to the payload length") {
  auto r = sample_record();
  r.dims = {64, 480};
  r.payload.assign(64 * 480, 1.0f);
  REQUIRE_NOTHROW(stm::serialize_record(r));
  r.payload.pop_back();
  REQUIRE_THROWS_AS(stm::serialize_record(r), stm::InvalidArgumentError);
}

TEST_CASE("corrupt records raise integrity errors") {
  TempStore store;
  auto r = sample_record();
  stm::cache_put(r, store.str());
  auto file = store.dir / "clip-42.gcfb.stm_segmental.stmf";
  REQUIRE(fs::exists(file));

  SECTION("truncated payload") {
    auto size = fs::file_size(file);
    fs::resize_file(file, size - 5);
    REQUIRE_THROWS_AS(
        stm::cache_get(store.str(), r.source_id, r.feature_kind, r.frontend,
                       r.pipeline_fingerprint),
        stm::FormatError);
  }
  SECTION("bad magic") {
    std::fstream f(file, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f.write("JUNK", 4);
    f.close();
    REQUIRE_THROWS_AS(
        stm::cache_get(store.str(), r.source_id, r.feature_kind, r.frontend,
                       r.pipeline_fingerprint),
        stm::FormatError);
  }
}

TEST_CASE("feature <-> record conversion preserves data and axes") {
  stm::StmFeature f;
  f.kind = stm::FeatureKind::stm_segmental;
  f.frontend = stm::FilterKind::gammatone;
  f.num_channels = 4;
  f.num_mod_bins = 160;
  f.num_segments = 2;
  f.data.resize(4 * 160 * 2);
  for (size_t i = 0; i < f.data.size(); ++i)
    f.data[i] = static_cast<float>(i) * 0.5f;  // float-exact values
  f.segment_times = {0.0, 0.5};
  f.source_id = "conv";
  f.source_duration_s = 1.5;

  auto rec = stm::record_from_feature(f, 99);
  REQUIRE(rec.dims == std::vector<uint32_t>{4, 160, 2});
  auto back = stm::feature_from_record(rec);
  REQUIRE(back.num_channels == 4);
  REQUIRE(back.num_segments == 2);
  REQUIRE(back.data == f.data);
  REQUIRE(back.segment_times == f.segment_times);
  REQUIRE(back.source_duration_s == 1.5);
  // Temporal axis spans [-80, 80) in steps of 1 Hz for 160 bins.
  REQUIRE(back.temporal_mod_axis.front() == -80.0);
  REQUIRE(back.temporal_mod_axis[80] == 0.0);
  REQUIRE(back.temporal_mod_axis.back() == 79.0);
}
