#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace splidar {

/// Number of workers to use for a requested cap; 0 means all hardware threads.
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(k) for k in [0, count) over contiguous static chunks. Each index is
/// visited exactly once, so bodies that only write their own slot are
/// deterministic regardless of the thread count.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < 64) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &body] {
      for (std::size_t k = begin; k < end; ++k) body(k);
    });
  }
}

}  // namespace splidar
