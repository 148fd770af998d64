#ifndef HEXATAG_PARALLEL_H_
#define HEXATAG_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hexatag {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. The first exception
// thrown by any call is rethrown after all threads finish.
template <typename Fn>
void ParallelFor(size_t count, int jobs, Fn &&fn) {
  size_t workers = std::min<size_t>(count, jobs < 1 ? 1 : static_cast<size_t>(jobs));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t t = 0; t < workers; ++t) threads.emplace_back(work);
  for (auto &t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hexatag

#endif  // HEXATAG_PARALLEL_H_
