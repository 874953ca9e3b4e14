#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace clustex {

// Runs fn(rep) for rep = 0..reps-1 on a small worker pool. Each replication
// must write only to its own output slot; results are then merged by the
// caller in replication order, so the schedule never affects the outcome.
template <class Fn>
void parallel_reps(std::int64_t reps, int threads, Fn fn) {
  if (threads <= 1 || reps <= 1) {
    for (std::int64_t r = 0; r < reps; ++r) fn(r);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::int64_t r; (r = next.fetch_add(1)) < reps;) {
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int width = static_cast<int>(std::min<std::int64_t>(threads, reps));
  pool.reserve(static_cast<std::size_t>(width));
  for (int t = 0; t < width; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw > 8 ? 8 : hw);
}

}  // namespace clustex
