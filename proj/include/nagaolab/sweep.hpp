#pragma once

// Block-parallel map over an ascending prime list with an ordered merge.
// Workers claim fixed-size blocks from a shared counter; results are
// concatenated in block order, so the output never depends on the number of
// workers or on completion order.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "nagaolab/finite_field.hpp"

namespace nagaolab {

inline constexpr std::size_t kSweepBlock = 512;

template <typename T>
struct SweepResult {
  std::vector<T> values;
  // Number of leading primes of the input whose blocks all completed. Less
  // than the input size only when the sweep was cancelled.
  std::size_t primes_done = 0;
};

// fn(Prime) -> std::optional<T>; nullopt entries (e.g. bad primes) are dropped.
template <typename T, typename Fn>
SweepResult<T> sweep_primes(std::span<const Prime> primes, unsigned workers, Fn&& fn,
                            const std::atomic<bool>* cancel = nullptr) {
  const std::size_t n_blocks = (primes.size() + kSweepBlock - 1) / kSweepBlock;
  std::vector<std::vector<T>> blocks(n_blocks);
  std::vector<char> finished(n_blocks, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      if (cancel && cancel->load(std::memory_order_relaxed)) return;
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      const std::size_t lo = b * kSweepBlock;
      const std::size_t hi = std::min(primes.size(), lo + kSweepBlock);
      std::vector<T> local;
      try {
        for (std::size_t i = lo; i < hi; ++i) {
          if (cancel && cancel->load(std::memory_order_relaxed)) return;  // partial block discarded
          if (auto v = fn(primes[i])) local.push_back(std::move(*v));
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      blocks[b] = std::move(local);
      finished[b] = 1;
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1 || n_blocks <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, n_blocks); ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult<T> out;
  for (std::size_t b = 0; b < n_blocks && finished[b]; ++b) {
    for (auto& v : blocks[b]) out.values.push_back(std::move(v));
    out.primes_done = std::min(primes.size(), (b + 1) * kSweepBlock);
  }
  return out;
}

}  // namespace nagaolab
