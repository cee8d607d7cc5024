#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace miranda {

/// Thread cap: min(hardware_concurrency, 8), overridable by the
/// MIRANDA_LAYERS_THREADS environment variable (1 = serial).
inline int thread_budget() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  n = std::min(n, 8);
  if (const char* env = std::getenv("MIRANDA_LAYERS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

/// Runs body(i) for i in [0, count). Each index writes only its own
/// results, so the outcome is identical for any thread count; callers
/// reduce sequentially afterwards. The lowest-index exception, if any,
/// is rethrown after all workers join.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& body) {
  const int workers = thread_budget();
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::mutex err_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += nw) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace miranda
