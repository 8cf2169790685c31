// Process-wide worker count and a static-partition parallel loop. Each index
// is handled by exactly one worker, so results never depend on the count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spdelab {

namespace detail {
inline int default_threads() {
  if (const char* env = std::getenv("SPDELAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{default_threads()};
  return n;
}
}  // namespace detail

inline int thread_count() { return detail::thread_setting().load(); }
inline void set_thread_count(int n) { detail::thread_setting().store(std::max(1, n)); }

// fn(i) for i in [0, n); the first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
  if (threads <= 0) threads = thread_count();
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace spdelab
