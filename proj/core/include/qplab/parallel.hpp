#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qplab {

inline unsigned default_worker_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(0..count-1) on up to `workers` threads with dynamic load
/// balancing. Slot i of any output buffer belongs to call i, so aggregation
/// order is independent of scheduling. fn must not throw; task wrappers
/// catch their own failures and record them.
template <typename Fn>
void parallel_for_ordered(std::size_t count, int workers, Fn&& fn) {
  if (count == 0) return;
  const std::size_t nw =
      std::min<std::size_t>(count, workers < 1 ? 1 : static_cast<std::size_t>(workers));
  if (nw <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (auto& t : pool) t.join();
}

}  // namespace qplab
