// Deterministic realization-level parallelism: results land in preassigned
// slots, so serial and parallel runs produce identical numbers.

#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bsq {

inline int default_workers() {
  if (const char* env = std::getenv("BSQ_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? (int)hw : 1;
}

// Runs fn(0..n-1); workers <= 0 picks the default count, 1 runs serially.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) workers = default_workers();
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve((size_t)workers);
  std::vector<std::exception_ptr> errors((size_t)workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[(size_t)w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bsq
