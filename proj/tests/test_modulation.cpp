// tests/test_modulation.cpp

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

#include "stm/modulation.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <numbers>
#include <random>

namespace {

stm::AuditorySpectrogram make_spectrogram(size_t K, size_t N) {
  stm::AuditorySpectrogram sg;
  sg.values.assign(K, std::vector<double>(N, 0.0));
  sg.envelope_rate = 160;
  sg.channel_freqs.resize(K, 0.0);
  sg.source_id = "synthetic";
  return sg;
}

stm::AuditorySpectrogram random_spectrogram(size_t K, size_t N,
                                            uint64_t seed) {
  auto sg = make_spectrogram(K, N);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (auto& row : sg.values)
    for (auto& v : row) v = d(rng);
  return sg;
}

}  // namespace

TEST_CASE("constant spectrogram concentrates in the DC bin") {
  const double value = 0.75;
  auto sg = make_spectrogram(64, 480);
  for (auto& row : sg.values) row.assign(480, value);
  auto f = stm::stm_global(sg, stm::FilterKind::gammatone);
  REQUIRE(f.num_channels == 64);
  REQUIRE(f.num_mod_bins == 480);
  const double dc = f.at(32, 240);
  REQUIRE(dc == Catch::Approx(64.0 * 480.0 * value).epsilon(1e-9));
  for (size_t k = 0; k < 64; ++k)
    for (size_t m = 0; m < 480; ++m) {
      if (k == 32 && m == 240) continue;
      REQUIRE(f.at(k, m) <= 1e-9 * dc);
    }
}

TEST_CASE("8 Hz envelope modulation peaks at the 8 Hz temporal bins") {
  auto sg = make_spectrogram(64, 480);
  for (size_t n = 0; n < 480; ++n)
    sg.values[10][n] =
        1.0 + std::cos(2.0 * std::numbers::pi * 8.0 * n / 160.0);
  auto f = stm::stm_global(sg, stm::FilterKind::gammatone);
  // Temporal marginal, DC column excluded.
  size_t best = 0;
  double best_v = -1.0;
  for (size_t m = 0; m < 480; ++m) {
    if (m == 240) continue;
    double acc = 0.0;
    for (size_t k = 0; k < 64; ++k) acc += f.at(k, m);
    if (acc > best_v) {
      best_v = acc;
      best = m;
    }
  }
  REQUIRE(std::abs(f.temporal_mod_axis[best]) ==
          Catch::Approx(8.0).margin(160.0 / 480.0 + 1e-9));
}

TEST_CASE("Parseval: map energy equals K*M times envelope energy") {
  auto sg = random_spectrogram(64, 480, 7);
  auto f = stm::stm_global(sg, stm::FilterKind::gammatone);
  double env_energy = 0.0;
  for (const auto& row : sg.values)
    for (double v : row) env_energy += v * v;
  double map_energy = 0.0;
  for (double v : f.data) map_energy += v * v;
  REQUIRE(map_energy ==
          Catch::Approx(64.0 * 480.0 * env_energy).epsilon(1e-6));
}

TEST_CASE("magnitudes are invariant to circular time shifts") {
  auto sg = random_spectrogram(16, 480, 11);
  auto base = stm::stm_global(sg, stm::FilterKind::gammatone);
  auto shifted = sg;
  for (auto& row : shifted.values)
    std::rotate(row.begin(), row.begin() + 123, row.end());
  auto moved = stm::stm_global(shifted, stm::FilterKind::gammatone);
  double dc = base.at(8, 240);
  for (size_t i = 0; i < base.data.size(); ++i)
    REQUIRE(std::abs(base.data[i] - moved.data[i]) <= 1e-9 * dc);
}

TEST_CASE("fixed-length policy truncates and zero-pads") {
  auto longer = random_spectrogram(8, 700, 3);
  auto f1 = stm::stm_global(longer, stm::FilterKind::gammatone);
  REQUIRE(f1.num_mod_bins == 480);
  auto shorter = random_spectrogram(8, 200, 4);
  auto f2 = stm::stm_global(shorter, stm::FilterKind::gammatone);
  REQUIRE(f2.num_mod_bins == 480);
  // Zero-padding must equal transforming the explicitly padded matrix.
  auto padded = make_spectrogram(8, 480);
  for (size_t k = 0; k < 8; ++k)
    std::copy(shorter.values[k].begin(), shorter.values[k].end(),
              padded.values[k].begin());
  auto f3 = stm::stm_global(padded, stm::FilterKind::gammatone);
  REQUIRE(f2.data == f3.data);
  REQUIRE(f2.source_duration_s == Catch::Approx(200.0 / 160.0));
}

TEST_CASE("segment count and times follow the hop arithmetic") {
  auto sg = random_spectrogram(8, 480, 5);
  auto f = stm::stm_segmental(sg, stm::FilterKind::gammachirp);
  REQUIRE(f.num_segments == 5);  // (480-160)/80 + 1
  REQUIRE(f.num_mod_bins == 160);
  REQUIRE(f.segment_times ==
          std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  auto sg2 = random_spectrogram(8, 489, 6);
  REQUIRE(stm::stm_segmental(sg2, stm::FilterKind::gammatone).num_segments ==
          5);
}

TEST_CASE("single segment equals the global map at matching length") {
  auto sg = random_spectrogram(8, 160, 9);
  auto seg = stm::stm_segmental(sg, stm::FilterKind::gammatone);
  REQUIRE(seg.num_segments == 1);
  auto glob = stm::stm_global(sg, stm::FilterKind::gammatone, 160);
  REQUIRE(seg.data == glob.data);
}

TEST_CASE("stationary spectrogram yields identical segments") {
  auto sg = make_spectrogram(8, 480);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(0.0, 2.0);
  for (auto& row : sg.values) row.assign(480, d(rng));
  auto f = stm::stm_segmental(sg, stm::FilterKind::gammatone);
  double dc = f.at(4, 80, 0);
  for (size_t k = 0; k < 8; ++k)
    for (size_t m = 0; m < 160; ++m)
      for (size_t s = 1; s < f.num_segments; ++s)
        REQUIRE(std::abs(f.at(k, m, s) - f.at(k, m, 0)) <= 1e-9 * dc);
}

TEST_CASE("segment marginals agree with the global map on stationary AM") {
  // Every channel carries the same 8 Hz envelope; the non-DC temporal peak
  // must land at 8 Hz in the global map and in every segment.
  auto sg = make_spectrogram(16, 480);
  for (size_t k = 0; k < 16; ++k)
    for (size_t n = 0; n < 480; ++n)
      sg.values[k][n] =
          (k + 1.0) *
          (1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * 8.0 * n / 160.0));
  auto marginal_peak_hz = [](const stm::StmFeature& f, size_t s) {
    size_t best = 0;
    double best_v = -1.0;
    for (size_t m = 0; m < f.num_mod_bins; ++m) {
      if (m == f.num_mod_bins / 2) continue;  // DC column
      double acc = 0.0;
      for (size_t k = 0; k < f.num_channels; ++k) acc += f.at(k, m, s);
      if (acc > best_v) {
        best_v = acc;
        best = m;
      }
    }
    return std::abs(f.temporal_mod_axis[best]);
  };
  auto global = stm::stm_global(sg, stm::FilterKind::gammatone);
  REQUIRE(marginal_peak_hz(global, 0) == Catch::Approx(8.0).margin(1e-12));
  auto seg = stm::stm_segmental(sg, stm::FilterKind::gammatone);
  for (size_t s = 0; s < seg.num_segments; ++s)
    REQUIRE(marginal_peak_hz(seg, s) == Catch::Approx(8.0).margin(1e-12));
}

TEST_CASE("too-short input for segmentation is rejected") {
  auto sg = random_spectrogram(8, 159, 2);
  REQUIRE_THROWS_AS(stm::stm_segmental(sg, stm::FilterKind::gammatone),
                    stm::InvalidArgumentError);
  auto empty = make_spectrogram(0, 0);
  REQUIRE_THROWS_AS(stm::stm_global(empty, stm::FilterKind::gammatone),
                    stm::InvalidArgumentError);
}

namespace {

stm::StmFeature tiny_feature(std::vector<double> vals,
                             const std::string& id) {
  stm::StmFeature f;
  f.kind = stm::FeatureKind::stm_global;
  f.frontend = stm::FilterKind::gammatone;
  f.num_channels = 1;
  f.num_mod_bins = vals.size();
  f.num_segments = 1;
  f.data = std::move(vals);
  f.source_id = id;
  return f;
}

}  // namespace

TEST_CASE("standardization: hand-checked two-point fit") {
  std::vector<stm::StmFeature> feats;
  feats.push_back(tiny_feature({0.0, 2.0}, "a"));
  feats.push_back(tiny_feature({2.0, 2.0}, "b"));
  auto [vecs, st] = stm::flatten_standardize(feats, {0, 1});
  REQUIRE(st.mean == std::vector<double>{1.0, 2.0});
  REQUIRE(st.std == std::vector<double>{1.0, 0.0});
  REQUIRE(vecs[0].values == std::vector<double>{-1.0, 0.0});
  REQUIRE(vecs[1].values == std::vector<double>{1.0, 0.0});
}

TEST_CASE("standardization edge cases") {
  SECTION("test vector at the training mean maps to zero") {
    std::vector<stm::StmFeature> feats;
    feats.push_back(tiny_feature({0.0, 4.0}, "a"));
    feats.push_back(tiny_feature({2.0, 0.0}, "b"));
    feats.push_back(tiny_feature({1.0, 2.0}, "probe"));  // the mean
    auto [vecs, st] = stm::flatten_standardize(feats, {0, 1});
    for (double v : vecs[2].values) REQUIRE(v == 0.0);
  }
  SECTION("single training vector standardizes to zeros") {
    std::vector<stm::StmFeature> feats;
    feats.push_back(tiny_feature({3.0, -1.0}, "only"));
    auto [vecs, st] = stm::flatten_standardize(feats, {0});
    REQUIRE(vecs[0].values == std::vector<double>{0.0, 0.0});
  }
  SECTION("empty training subset is rejected") {
    std::vector<stm::StmFeature> feats;
    feats.push_back(tiny_feature({1.0}, "x"));
    REQUIRE_THROWS_AS(stm::flatten_standardize(feats, {}),
                      stm::InvalidArgumentError);
  }
  SECTION("dimension mismatch is rejected") {
    std::vector<stm::StmFeature> feats;
    feats.push_back(tiny_feature({1.0, 2.0}, "x"));
    feats.push_back(tiny_feature({1.0}, "y"));
    REQUIRE_THROWS_AS(stm::flatten_standardize(feats, {0, 1}),
                      stm::InvalidArgumentError);
  }
}

TEST_CASE("standardizing a standardized training set is idempotent") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  std::vector<stm::StmFeature> feats;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> v(6);
    for (auto& x : v) x = d(rng);
    feats.push_back(tiny_feature(std::move(v), "f" + std::to_string(i)));
  }
  std::vector<size_t> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  auto [vecs, st] = stm::flatten_standardize(feats, all);
  std::vector<std::vector<double>> rows;
  for (const auto& v : vecs) rows.push_back(v.values);
  stm::Standardizer st2;
  st2.fit(rows);
  for (size_t j = 0; j < st2.mean.size(); ++j) {
    REQUIRE(st2.mean[j] == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(st2.std[j] == Catch::Approx(1.0).margin(1e-9));
  }
}
