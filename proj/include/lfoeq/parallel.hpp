#ifndef LFOEQ_PARALLEL_HPP_
#define LFOEQ_PARALLEL_HPP_

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lfoeq {

// Runs fn(0..n_tasks-1) across a fixed pool. Tasks must be independent;
// results should be written to preallocated per-index slots so the output is
// identical regardless of scheduling. The first exception wins and is
// rethrown on the caller thread.
inline void parallel_for(int n_tasks, int workers,
                         const std::function<void(int)>& fn) {
  if (workers <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      int i = next.fetch_add(1);
      if (i >= n_tasks) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> threads;
  int n_threads = std::min(workers, n_tasks);
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lfoeq

#endif  // LFOEQ_PARALLEL_HPP_
