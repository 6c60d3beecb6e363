// tests/test_erb.cpp

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

#include "stm/erb.hpp"

#include <catch2/catch_amalgamated.hpp>

namespace {

// Independent inversion of the ERB-number formula by bisection, used as the
// oracle for channel placement.
double invert_cam_bisect(double cam) {
  double lo = 0.0, hi = 50000.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (stm::erb_number(mid) < cam)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("erb_bandwidth evaluates the ERB formula") {
  REQUIRE(stm::erb_bandwidth(0.0) == 24.7);
  REQUIRE(std::abs(stm::erb_bandwidth(1.0) - 132.639) <= 1e-9);
  REQUIRE(std::abs(stm::erb_bandwidth(7.6) - 24.7 * (4.37 * 7.6 + 1.0)) <=
          1e-9);
  REQUIRE_THROWS_AS(stm::erb_bandwidth(-0.1), stm::InvalidArgumentError);
}

TEST_CASE("erb_space endpoints and monotonicity") {
  SECTION("two channels are exactly the endpoints") {
    auto f = stm::erb_space(60.0, 7600.0, 2);
    REQUIRE(f == std::vector<double>{60.0, 7600.0});
  }
  SECTION("single channel requires equal endpoints") {
    REQUIRE(stm::erb_space(1000.0, 1000.0, 1) ==
            std::vector<double>{1000.0});
    REQUIRE_THROWS_AS(stm::erb_space(60.0, 7600.0, 1),
                      stm::InvalidArgumentError);
  }
  SECTION("midpoint of three channels bisects the cam range") {
    auto f = stm::erb_space(60.0, 7600.0, 3);
    double cam_mid =
        0.5 * (stm::erb_number(60.0) + stm::erb_number(7600.0));
    REQUIRE(f[1] == Catch::Approx(invert_cam_bisect(cam_mid)).margin(1e-4));
  }
  SECTION("64 channels: strictly increasing, uniform cam gaps") {
    auto f = stm::erb_space(60.0, 7600.0, 64);
    REQUIRE(f.size() == 64);
    REQUIRE(f.front() == 60.0);
    REQUIRE(f.back() == 7600.0);
    double gap0 = stm::erb_number(f[1]) - stm::erb_number(f[0]);
    for (size_t k = 1; k < f.size(); ++k) {
      REQUIRE(f[k] > f[k - 1]);
      double gap = stm::erb_number(f[k]) - stm::erb_number(f[k - 1]);
      REQUIRE(gap == Catch::Approx(gap0).margin(1e-9));
    }
  }
}

TEST_CASE("erb_number round-trips through its inverse") {
  for (double f : {60.0, 440.0, 1000.0, 7600.0})
    REQUIRE(stm::erb_number_inverse(stm::erb_number(f)) ==
            Catch::Approx(f).epsilon(1e-12));
}
