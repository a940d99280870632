#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gluecert {

// Runs fn(i) for i in [0, count) on up to `threads` workers.  Work items must
// be independent; results are reduced by the caller afterwards, so the final
// outcome does not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min<std::size_t>(threads, count);
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace gluecert
