// include/stm/resample.hpp

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
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "stm/common.hpp"

// Band-limited rational resampling by a polyphase Kaiser-windowed sinc.
// The prototype is cut off at half the lower of the two rates; each
// polyphase branch is normalized to unit DC gain so constants survive
// exactly, and edges are handled by replicating the boundary samples.

namespace stm {

namespace detail {

inline double bessel_i0(double x) {
  // Power series; converges quickly for the beta values used here.
  double sum = 1.0, term = 1.0;
  double half = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < 1e-21 * sum) break;
  }
  return sum;
}

inline std::vector<double> kaiser_sinc_taps(int up, int down, double beta,
                                            int half_len) {
  const int n_taps = 2 * half_len + 1;
  // Cutoff as a fraction of Nyquist at the upsampled rate.
  const double cutoff = 1.0 / static_cast<double>(std::max(up, down));
  std::vector<double> h(n_taps);
  const double i0b = bessel_i0(beta);
  for (int i = 0; i < n_taps; ++i) {
    const double t = static_cast<double>(i - half_len);
    double s;
    if (t == 0.0) {
      s = cutoff;
    } else {
      const double a = std::numbers::pi * cutoff * t;
      s = cutoff * std::sin(a) / a;
    }
    const double r = t / static_cast<double>(half_len);
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r)));
    h[i] = s * w / i0b;
  }
  return h;
}

}  // namespace detail

/// Resample x from sample rate (up/down)-rationally. Output sample m sits at
/// input position m*down/up; output length is round(n*up/down).
inline std::vector<double> resample_poly(std::span<const double> x, int up,
                                         int down) {
  if (up <= 0 || down <= 0)
    throw InvalidArgumentError("resample_poly: factors must be positive");
  if (x.empty()) return {};
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  const int64_t n = static_cast<int64_t>(x.size());
  if (up == 1 && down == 1) return std::vector<double>(x.begin(), x.end());

  const int half = 10 * std::max(up, down);
  auto h = detail::kaiser_sinc_taps(up, down, 5.0, half);
  const int n_taps = static_cast<int>(h.size());

  // Per-branch DC normalization: taps congruent mod `up` act together.
  std::vector<double> phase_gain(up, 0.0);
  for (int t = 0; t < n_taps; ++t) phase_gain[t % up] += h[t];
  for (int p = 0; p < up; ++p) {
    if (phase_gain[p] <= 0.0)
      throw InvalidArgumentError("resample_poly: degenerate filter phase");
  }

  const int64_t out_len = std::llround(static_cast<double>(n) * up / down);
  std::vector<double> y(static_cast<size_t>(out_len));
  const auto ceil_div = [](int64_t a, int64_t b) {
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
  };
  for (int64_t m = 0; m < out_len; ++m) {
    const int64_t j0 = m * down + half;  // center tap position, high-rate grid
    // Input indices i with tap index t = j0 - i*up inside [0, n_taps).
    const int64_t i_lo = ceil_div(j0 - n_taps + 1, up);
    const int64_t i_hi = j0 / up;
    double acc = 0.0;
    for (int64_t i = i_lo; i <= i_hi; ++i) {
      const int64_t t = j0 - i * up;
      const int64_t src = std::clamp<int64_t>(i, 0, n - 1);  // edge replicate
      acc += h[static_cast<size_t>(t)] * x[static_cast<size_t>(src)];
    }
    y[static_cast<size_t>(m)] = acc / phase_gain[j0 % up];
  }
  return y;
}

}  // namespace stm
