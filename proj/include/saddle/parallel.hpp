#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace saddle {

/// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks must
/// write to disjoint outputs; the first exception is rethrown.
template <typename Task>
void parallel_for(std::uint64_t count, int threads, Task task) {
  const std::uint64_t workers =
      std::min<std::uint64_t>(count, static_cast<std::uint64_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex guard;
  std::vector<std::thread> pool;
  for (std::uint64_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(guard);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace saddle
