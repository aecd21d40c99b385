#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace casbr {

// Runs f(i) for i in [0, count). Work items must write only to their own
// slots; completion order is unspecified, so results stay deterministic as
// long as callers reduce them by index afterwards.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = hw > 1 ? std::min<std::size_t>(hw, count) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace casbr
