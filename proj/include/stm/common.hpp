// include/stm/common.hpp

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

#include <atomic>
#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace stm {

// ---------------------------------------------------------------------------
// Errors. One type per failure class so callers can catch selectively.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File missing, unreadable, or not writable.
class FileError : public Error {
 public:
  using Error::Error;
};

/// Malformed container or payload (bad magic, wrong version, truncation).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Audio encoding the pipeline does not accept.
class UnsupportedEncodingError : public Error {
 public:
  using Error::Error;
};

/// Zero-length audio payload.
class EmptyAudioError : public Error {
 public:
  using Error::Error;
};

/// Argument fails a precondition (bad ranges, mismatched dimensions, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Little-endian byte packing used by every on-disk container.
// ---------------------------------------------------------------------------

namespace bytes {

template <typename T>
inline void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const void* data, size_t size)
      : p_(static_cast<const char*>(data)), size_(size) {}
  explicit Reader(const std::string& s) : Reader(s.data(), s.size()) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > size_)
      throw FormatError("truncated payload: wanted " +
                        std::to_string(sizeof(T)) + " bytes at offset " +
                        std::to_string(pos_));
    T v;
    std::memcpy(&v, p_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_bytes(size_t n) {
    if (pos_ + n > size_)
      throw FormatError("truncated payload: wanted " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_));
    std::string s(p_ + pos_, n);
    pos_ += n;
    return s;
  }

  size_t remaining() const { return size_ - pos_; }
  size_t pos() const { return pos_; }

 private:
  const char* p_;
  size_t size_;
  size_t pos_ = 0;
};

}  // namespace bytes

// ---------------------------------------------------------------------------
// FNV-1a, used for pipeline fingerprints and content-derived ids.
// ---------------------------------------------------------------------------

inline uint64_t fnv1a64(const void* data, size_t n,
                        uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

inline std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

// ---------------------------------------------------------------------------
// parallel_for: run fn(i) for i in [0, count) on up to max_threads workers.
// Each index must write only its own output slot.
// ---------------------------------------------------------------------------

inline void parallel_for(size_t count, const std::function<void(size_t)>& fn,
                         unsigned max_threads = 0) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned n_threads = max_threads ? std::min(max_threads, hw) : hw;
  n_threads = static_cast<unsigned>(
      std::min<size_t>(n_threads, count));
  if (n_threads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= count || failed.load(std::memory_order_relaxed)) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stm
