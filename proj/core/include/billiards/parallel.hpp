#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace billiards {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs work(worker, begin, end) over a contiguous partition of [0, total).
// Results must not depend on the partition; callers merge worker-local
// integer accumulators so traces stay identical for any thread count.
inline void parallel_chunks(std::size_t total, unsigned threads,
                            const std::function<void(unsigned, std::size_t, std::size_t)>& work) {
  threads = resolve_threads(threads);
  if (threads <= 1 || total < 2) {
    work(0, 0, total);
    return;
  }
  if (threads > total) threads = static_cast<unsigned>(total);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = total * w / threads;
    const std::size_t end = total * (w + 1) / threads;
    pool.emplace_back([&, w, begin, end] {
      try {
        work(w, begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& thread : pool) thread.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace billiards
