#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracfield {

/// Worker count from FRACFIELD_THREADS (unset or 0 means one per hardware thread).
int worker_count();

/// Calls f(i) for i in [0, n) on up to `workers` threads, each thread owning a
/// contiguous block. Results must not depend on the block layout; the first
/// exception thrown by any worker is rethrown.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(n, workers < 1 ? 1 : workers));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t b = 0; b < w; ++b) {
    pool.emplace_back([&, b] {
      try {
        for (std::size_t i = b * n / w; i < (b + 1) * n / w; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace fracfield
