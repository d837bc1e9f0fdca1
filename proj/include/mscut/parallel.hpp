#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mscut {

/// Runs body(i) for i in [0, n) on up to `threads` workers using static
/// contiguous chunks. Callers write results into per-index slots, so the
/// outcome never depends on the thread count.
template <class Body>
void parallel_for(int n, int threads, Body &&body) {
  if (n <= 0)
    return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i)
      body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end)
      break;
    pool.emplace_back([&, begin, end] {
      try {
        for (int i = begin; i < end; ++i)
          body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
      }
    });
  }
  for (auto &worker : pool)
    worker.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace mscut
