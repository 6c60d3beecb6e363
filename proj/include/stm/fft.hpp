// include/stm/fft.hpp

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
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "stm/common.hpp"

// Complex FFT for arbitrary sizes: decimation-in-time with radix-4/2/3/5
// kernels, an O(r^2) butterfly for other small primes, and Bluestein's
// chirp-z algorithm when a prime factor is too large to be worth a direct
// butterfly. Plans precompute twiddles and are immutable, so one plan can
// be shared across threads.

namespace stm::fft {

using cplx = std::complex<double>;

class Plan {
 public:
  /// Shared plan for size n; plans are cached per size.
  static std::shared_ptr<const Plan> get(size_t n);

  size_t size() const { return n_; }

  /// In-place forward DFT, X[k] = sum_j x[j] exp(-2*pi*i*j*k/n). Unnormalized.
  void forward(cplx* data) const;

  /// In-place inverse DFT including the 1/n factor.
  void inverse(cplx* data) const;

  explicit Plan(size_t n);

 private:
  void transform(cplx* out, const cplx* in, size_t n, size_t stride,
                 size_t level) const;
  void forward_mixed(cplx* data) const;
  void forward_bluestein(cplx* data) const;

  size_t n_;
  std::vector<uint32_t> radices_;
  std::vector<cplx> twiddle_;  // exp(-2*pi*i*j/n), j < n

  // Bluestein state (only when a large prime factor is present).
  bool bluestein_ = false;
  std::shared_ptr<const Plan> sub_;  // power-of-two sub-plan
  std::vector<cplx> chirp_;          // exp(-i*pi*j^2/n)
  std::vector<cplx> chirp_fft_;      // FFT of the chirp kernel
};

namespace detail {

inline std::vector<uint32_t> factorize(size_t n, bool* big_prime) {
  std::vector<uint32_t> radices;
  *big_prime = false;
  while (n % 4 == 0) {
    radices.push_back(4);
    n /= 4;
  }
  for (uint32_t r : {2u, 3u, 5u}) {
    while (n % r == 0) {
      radices.push_back(r);
      n /= r;
    }
  }
  for (uint32_t r = 7; n > 1;) {
    if (n % r == 0) {
      if (r > 61) {
        *big_prime = true;
        return radices;
      }
      radices.push_back(r);
      n /= r;
    } else {
      r += (r % 6 == 1) ? 4 : 2;  // 7, 11, 13, 17, ... candidate pattern
      if (static_cast<uint64_t>(r) * r > n) r = static_cast<uint32_t>(n);
    }
  }
  return radices;
}

inline size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

inline Plan::Plan(size_t n) : n_(n) {
  if (n == 0) throw InvalidArgumentError("fft: size must be positive");
  bool big_prime = false;
  radices_ = detail::factorize(n, &big_prime);
  if (big_prime) {
    bluestein_ = true;
    size_t m = detail::next_pow2(2 * n - 1);
    sub_ = std::make_shared<Plan>(m);
    chirp_.resize(n);
    for (size_t j = 0; j < n; ++j) {
      // j^2 mod 2n keeps the phase argument small and exact.
      uint64_t q = static_cast<uint64_t>(
          (static_cast<unsigned __int128>(j) * j) % (2 * n));
      double phase = -std::numbers::pi * static_cast<double>(q) /
                     static_cast<double>(n);
      chirp_[j] = cplx(std::cos(phase), std::sin(phase));
    }
    std::vector<cplx> b(m, cplx(0.0, 0.0));
    b[0] = std::conj(chirp_[0]);
    for (size_t j = 1; j < n; ++j) {
      b[j] = std::conj(chirp_[j]);
      b[m - j] = b[j];
    }
    sub_->forward(b.data());
    chirp_fft_ = std::move(b);
    return;
  }
  twiddle_.resize(n);
  for (size_t j = 0; j < n; ++j) {
    double phase = -2.0 * std::numbers::pi * static_cast<double>(j) /
                   static_cast<double>(n);
    twiddle_[j] = cplx(std::cos(phase), std::sin(phase));
  }
}

inline std::shared_ptr<const Plan> Plan::get(size_t n) {
  static std::mutex mu;
  static std::map<size_t, std::shared_ptr<const Plan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const Plan>(n);
  cache.emplace(n, plan);
  return plan;
}

inline void Plan::transform(cplx* out, const cplx* in, size_t n, size_t stride,
                            size_t level) const {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const uint32_t r = radices_[level];
  const size_t m = n / r;
  for (uint32_t i = 0; i < r; ++i)
    transform(out + i * m, in + i * stride, m, stride * r, level + 1);

  const size_t tw_step = n_ / n;
  switch (r) {
    case 2: {
      for (size_t q = 0; q < m; ++q) {
        cplx a = out[q];
        cplx b = out[m + q] * twiddle_[q * tw_step];
        out[q] = a + b;
        out[m + q] = a - b;
      }
      break;
    }
    case 4: {
      for (size_t q = 0; q < m; ++q) {
        size_t w = q * tw_step;
        cplx t0 = out[q];
        cplx t1 = out[m + q] * twiddle_[w];
        cplx t2 = out[2 * m + q] * twiddle_[2 * w];
        cplx t3 = out[3 * m + q] * twiddle_[3 * w];
        cplx a = t0 + t2, b = t0 - t2;
        cplx c = t1 + t3;
        cplx d0 = t1 - t3;
        cplx d(d0.imag(), -d0.real());  // -i * (t1 - t3)
        out[q] = a + c;
        out[m + q] = b + d;
        out[2 * m + q] = a - c;
        out[3 * m + q] = b - d;
      }
      break;
    }
    case 3: {
      constexpr double k = 0.86602540378443864676;  // sin(pi/3)
      for (size_t q = 0; q < m; ++q) {
        size_t w = q * tw_step;
        cplx x0 = out[q];
        cplx t1 = out[m + q] * twiddle_[w];
        cplx t2 = out[2 * m + q] * twiddle_[2 * w];
        cplx s = t1 + t2;
        cplx d = t1 - t2;
        cplx jd(k * d.imag(), -k * d.real());  // -i*k*(t1 - t2)
        cplx u = x0 - 0.5 * s;
        out[q] = x0 + s;
        out[m + q] = u + jd;
        out[2 * m + q] = u - jd;
      }
      break;
    }
    case 5: {
      constexpr double c1 = 0.30901699437494742410;   // cos(2*pi/5)
      constexpr double c2 = -0.80901699437494742410;  // cos(4*pi/5)
      constexpr double s1 = 0.95105651629515357212;   // sin(2*pi/5)
      constexpr double s2 = 0.58778525229247312917;   // sin(4*pi/5)
      for (size_t q = 0; q < m; ++q) {
        size_t w = q * tw_step;
        cplx x0 = out[q];
        cplx t1 = out[m + q] * twiddle_[w];
        cplx t2 = out[2 * m + q] * twiddle_[2 * w];
        cplx t3 = out[3 * m + q] * twiddle_[3 * w];
        cplx t4 = out[4 * m + q] * twiddle_[4 * w];
        cplx sa = t1 + t4, da = t1 - t4;
        cplx sb = t2 + t3, db = t2 - t3;
        cplx u1 = x0 + c1 * sa + c2 * sb;
        cplx u2 = x0 + c2 * sa + c1 * sb;
        cplx v1 = s1 * da + s2 * db;
        cplx v2 = s2 * da - s1 * db;
        cplx jv1(v1.imag(), -v1.real());  // -i*v1
        cplx jv2(v2.imag(), -v2.real());  // -i*v2
        out[q] = x0 + sa + sb;
        out[m + q] = u1 + jv1;
        out[4 * m + q] = u1 - jv1;
        out[2 * m + q] = u2 + jv2;
        out[3 * m + q] = u2 - jv2;
      }
      break;
    }
    default: {
      // Generic O(r^2) butterfly for small odd primes.
      std::vector<cplx> t(r);
      for (size_t q = 0; q < m; ++q) {
        for (uint32_t i = 0; i < r; ++i)
          t[i] = out[i * m + q] * twiddle_[(i * q * tw_step) % n_];
        for (uint32_t k = 0; k < r; ++k) {
          cplx acc = t[0];
          for (uint32_t i = 1; i < r; ++i)
            acc += t[i] * twiddle_[(static_cast<size_t>(i) * k % r) *
                                   (n_ / r)];
          out[k * m + q] = acc;
        }
      }
      break;
    }
  }
}

inline void Plan::forward_mixed(cplx* data) const {
  std::vector<cplx> scratch(data, data + n_);
  transform(data, scratch.data(), n_, 1, 0);
}

inline void Plan::forward_bluestein(cplx* data) const {
  const size_t m = sub_->size();
  std::vector<cplx> a(m, cplx(0.0, 0.0));
  for (size_t j = 0; j < n_; ++j) a[j] = data[j] * chirp_[j];
  sub_->forward(a.data());
  for (size_t j = 0; j < m; ++j) a[j] *= chirp_fft_[j];
  sub_->inverse(a.data());
  for (size_t k = 0; k < n_; ++k) data[k] = a[k] * chirp_[k];
}

inline void Plan::forward(cplx* data) const {
  if (n_ == 1) return;
  if (bluestein_)
    forward_bluestein(data);
  else
    forward_mixed(data);
}

inline void Plan::inverse(cplx* data) const {
  for (size_t j = 0; j < n_; ++j) data[j] = std::conj(data[j]);
  forward(data);
  const double inv = 1.0 / static_cast<double>(n_);
  for (size_t j = 0; j < n_; ++j)
    data[j] = std::conj(data[j]) * inv;
}

/// Convenience wrappers.
inline void forward(std::vector<cplx>& v) { Plan::get(v.size())->forward(v.data()); }
inline void inverse(std::vector<cplx>& v) { Plan::get(v.size())->inverse(v.data()); }

}  // namespace stm::fft
