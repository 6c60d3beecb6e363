// tests/test_fft.cpp

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

#include "stm/fft.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <numbers>
#include <random>

using stm::fft::cplx;

namespace {

// Slow reference DFT, the oracle everything else is checked against.
std::vector<cplx> dft_reference(const std::vector<cplx>& x) {
  const size_t n = x.size();
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) {
    cplx acc(0.0, 0.0);
    for (size_t j = 0; j < n; ++j) {
      double phase = -2.0 * std::numbers::pi *
                     static_cast<double>((j * k) % n) / static_cast<double>(n);
      acc += x[j] * cplx(std::cos(phase), std::sin(phase));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<cplx> random_signal(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(dist(rng), dist(rng));
  return x;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("forward transform matches reference DFT across radix mixes") {
  // Sizes cover radix 2/3/4/5 paths, generic primes, and Bluestein.
  for (size_t n : {1u, 2u, 3u, 4u, 5u, 6u, 8u, 12u, 15u, 16u, 30u, 47u, 64u,
                   97u, 128u, 160u, 360u, 480u, 1000u, 1013u}) {
    auto x = random_signal(n, 1234 + n);
    auto expect = dft_reference(x);
    auto got = x;
    stm::fft::forward(got);
    double scale = 0.0;
    for (const auto& v : expect) scale = std::max(scale, std::abs(v));
    INFO("n = " << n);
    REQUIRE(max_abs_diff(got, expect) <= 1e-9 * std::max(scale, 1.0));
  }
}

TEST_CASE("inverse undoes forward") {
  for (size_t n : {5u, 48u, 97u, 480u, 1013u}) {
    auto x = random_signal(n, 77 + n);
    auto y = x;
    stm::fft::forward(y);
    stm::fft::inverse(y);
    INFO("n = " << n);
    REQUIRE(max_abs_diff(y, x) <= 1e-10);
  }
}

TEST_CASE("unnormalized Parseval identity") {
  const size_t n = 480;
  auto x = random_signal(n, 9);
  auto y = x;
  stm::fft::forward(y);
  double ex = 0.0, ey = 0.0;
  for (const auto& v : x) ex += std::norm(v);
  for (const auto& v : y) ey += std::norm(v);
  REQUIRE(ey == Catch::Approx(n * ex).epsilon(1e-12));
}

TEST_CASE("pure tone lands in a single bin") {
  const size_t n = 512;
  const size_t bin = 37;
  std::vector<cplx> x(n);
  for (size_t j = 0; j < n; ++j) {
    double phase = 2.0 * std::numbers::pi * static_cast<double>(bin * j) /
                   static_cast<double>(n);
    x[j] = cplx(std::cos(phase), std::sin(phase));
  }
  stm::fft::forward(x);
  for (size_t k = 0; k < n; ++k) {
    if (k == bin)
      REQUIRE(std::abs(x[k]) == Catch::Approx(double(n)).epsilon(1e-10));
    else
      REQUIRE(std::abs(x[k]) < 1e-8 * n);
  }
}
