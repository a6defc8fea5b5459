#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mixlab {

/// Worker count used by replica loops; 0 means hardware concurrency.
void set_thread_count(unsigned n) noexcept;
unsigned thread_count() noexcept;

/// Calls fn(i) for i in [0, n) across the configured workers. Each index
/// is processed exactly once; callers write results into slot i so that
/// any later reduction runs in index order, independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mixlab

namespace mixlab {

/// Fixed replica partition used by every Monte Carlo reduction. Results
/// depend on this constant, never on the worker count.
inline constexpr std::size_t kReplicaBlock = 64;

/// Runs fn(acc, replica) for every replica, grouping replicas into fixed
/// blocks of kReplicaBlock. Each block gets its own accumulator (copied
/// from `init`) and processes its replicas in increasing order; blocks are
/// returned in order for the caller to merge.
template <class Acc, class Fn>
std::vector<Acc> blocked_replicas(std::size_t replicas, const Acc& init, Fn&& fn) {
  const std::size_t blocks = (replicas + kReplicaBlock - 1) / kReplicaBlock;
  std::vector<Acc> acc(blocks, init);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kReplicaBlock;
    const std::size_t hi = std::min(replicas, lo + kReplicaBlock);
    for (std::size_t r = lo; r < hi; ++r) fn(acc[b], r);
  });
  return acc;
}

}  // namespace mixlab
