#ifndef GSAMPLE_PARALLEL_HPP
#define GSAMPLE_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gsample {

/// Worker count: `requested` if positive, else the hardware concurrency,
/// capped by GSAMPLE_THREADS when that is a positive integer. At least 1.
inline int worker_count(int requested = 0) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("GSAMPLE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (const std::exception&) {
    }
  }
  return n;
}

/// Calls f(i) for i in [0, n) on up to `threads` workers, static chunks.
/// The first exception thrown by any worker is rethrown.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const int begin = static_cast<int>(static_cast<long long>(n) * t / threads);
      const int end = static_cast<int>(static_cast<long long>(n) * (t + 1) / threads);
      try {
        for (int i = begin; i < end; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace gsample

#endif  // GSAMPLE_PARALLEL_HPP
