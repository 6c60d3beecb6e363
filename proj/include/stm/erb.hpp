// include/stm/erb.hpp

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
#include <vector>

#include "stm/common.hpp"

// Equivalent rectangular bandwidth scale of the auditory periphery.

namespace stm {

/// ERB in Hz at center frequency f_khz (in kHz): 24.7 * (4.37*f + 1).
inline double erb_bandwidth(double f_khz) {
  if (f_khz < 0.0)
    throw InvalidArgumentError("erb_bandwidth: negative frequency");
  return 24.7 * (4.37 * f_khz + 1.0);
}

/// ERB-number (Cam) of a frequency in Hz.
inline double erb_number(double f_hz) {
  return 21.4 * std::log10(4.37 * f_hz / 1000.0 + 1.0);
}

/// Frequency in Hz at a given ERB-number.
inline double erb_number_inverse(double cam) {
  return (std::pow(10.0, cam / 21.4) - 1.0) * 1000.0 / 4.37;
}

/// K center frequencies equally spaced on the ERB-number scale, endpoints
/// exactly f_min and f_max.
inline std::vector<double> erb_space(double f_min, double f_max, int count) {
  if (count < 1) throw InvalidArgumentError("erb_space: count must be >= 1");
  if (count == 1) {
    if (f_min != f_max)
      throw InvalidArgumentError(
          "erb_space: a single channel needs f_min == f_max");
    return {f_min};
  }
  if (!(0.0 < f_min && f_min < f_max))
    throw InvalidArgumentError("erb_space: need 0 < f_min < f_max");
  const double lo = erb_number(f_min);
  const double hi = erb_number(f_max);
  std::vector<double> freqs(count);
  for (int k = 0; k < count; ++k) {
    double cam = lo + (hi - lo) * k / (count - 1);
    freqs[k] = erb_number_inverse(cam);
  }
  freqs.front() = f_min;
  freqs.back() = f_max;
  return freqs;
}

}  // namespace stm
