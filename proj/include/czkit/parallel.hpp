#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace czkit {

// Worker count resolution: explicit set_worker_count() > CZKIT_WORKERS env >
// hardware concurrency. Results of all parallel loops are written to
// preallocated disjoint slots, so they do not depend on the thread count.
inline int& worker_count_slot() {
  static int count = 0;
  return count;
}

inline void set_worker_count(int n) { worker_count_slot() = n > 0 ? n : 0; }

inline int worker_count() {
  if (worker_count_slot() > 0) return worker_count_slot();
  if (const char* env = std::getenv("CZKIT_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs body(i) for i in [0, n). Each index is processed exactly once; the
// caller's body must only write to state owned by index i.
template <class F>
inline void parallel_for(std::int64_t n, F&& body) {
  int workers = worker_count();
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  const std::int64_t chunk = std::max<std::int64_t>(1, n / (workers * 8));
  auto run = [&] {
    for (;;) {
      std::int64_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      std::int64_t end = std::min(n, begin + chunk);
      for (std::int64_t i = begin; i < end; ++i) body(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

} // namespace czkit
