#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rightmost {

/// Trials are grouped into fixed blocks so that the partition, and hence
/// the reduction order, never depends on the thread count.
inline constexpr std::int64_t kTrialBlock = 1024;

/// Worker count: `requested` if positive, else the hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs `count` independent tasks on a small pool. `task(i)` returns a
/// value of type R; results come back indexed by task. The first exception
/// thrown by any task is rethrown after all workers have stopped.
template <class R, class Task>
std::vector<R> parallel_map(std::int64_t count, int threads, Task task) {
  std::vector<R> results(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[static_cast<std::size_t>(i)] = task(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };

  const int n = std::max(1, std::min<int>(resolve_threads(threads),
                                          static_cast<int>(std::min<std::int64_t>(count, 1 << 20))));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Runs trials 0..trials-1. `trial(index, acc)` folds one trial into a
/// per-block accumulator of type Acc; blocks are then merged in block
/// order with `merge(total, block)`.
template <class Acc, class Trial, class Merge>
Acc run_trials(std::int64_t trials, int threads, Acc init, Trial trial, Merge merge) {
  const std::int64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  auto partials = parallel_map<Acc>(blocks, threads, [&](std::int64_t b) {
    Acc acc = init;
    const std::int64_t end = std::min(trials, (b + 1) * kTrialBlock);
    for (std::int64_t t = b * kTrialBlock; t < end; ++t) trial(t, acc);
    return acc;
  });
  Acc total = std::move(init);
  for (auto& part : partials) merge(total, part);
  return total;
}

}  // namespace rightmost
