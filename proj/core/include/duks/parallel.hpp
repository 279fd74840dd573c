#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace duks {

/// Number of workers to use when the caller asks for "automatic" (0).
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// processed exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, resolve_workers(workers)));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min(threads, count);
  pool.reserve(spawn);
  for (std::size_t w = 0; w < spawn; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace duks
