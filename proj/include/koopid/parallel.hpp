// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace koopid {

/// Worker count: KOOPID_THREADS if set to a positive integer, otherwise the
/// hardware concurrency; requested > 0 overrides both but is still capped by
/// KOOPID_THREADS.
inline int thread_count(int requested = 0) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int cap = 0;
  if (const char* env = std::getenv("KOOPID_THREADS")) {
    try {
      cap = std::stoi(env);
    } catch (...) {
      cap = 0;
    }
  }
  int n = requested > 0 ? requested : hw;
  if (cap > 0) n = std::min(n, cap);
  return std::max(n, 1);
}

/// Calls fn(i) for i in [0, n). Results must be written to per-index slots;
/// the first exception is rethrown after all workers finish.
template <class Fn>
void parallel_for(int n, Fn&& fn, int threads = 0) {
  const int workers = std::min(thread_count(threads), std::max(n, 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace koopid
