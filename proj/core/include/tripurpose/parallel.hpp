#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace tripurpose {

// Runs fn(i) for i in [0, n) across `workers` threads using a static block
// partition. Callers must write only to per-index slots; with that contract
// the result is identical for any worker count, and workers <= 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  auto w = static_cast<std::size_t>(workers);
  if (w > n) w = n;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    std::size_t begin = t * n / w;
    std::size_t end = (t + 1) * n / w;
    threads.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace tripurpose
