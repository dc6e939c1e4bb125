#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace belldet {

// Resolves a thread-count request: explicit value wins, then the
// BELLDET_THREADS environment variable, then hardware concurrency.
int resolve_threads(int requested);

// Runs tasks 0..count-1 on a worker pool and collects results in task order,
// so any later reduction is independent of scheduling. Task partitioning must
// not depend on the thread count if determinism across machines is wanted;
// callers pick `count` from the problem shape.
template <class T, class Task>
std::vector<T> run_tasks(int count, int threads, Task task) {
  std::vector<T> results(count);
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) results[i] = task(i);
    return results;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  int workers = threads < count ? threads : count;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          results[i] = task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace belldet
