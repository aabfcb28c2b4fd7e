#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bqr {

// Worker count: `requested` if nonzero, else the hardware concurrency,
// capped by BQR_THREADS when set. Always at least 1.
std::size_t worker_count(std::size_t requested = 0);

// Runs body(i) for i in [0, count) on up to `workers` threads. Tasks are
// independent; results must be written to slot i by the body so the outcome
// does not depend on scheduling. Exceptions are captured per task and the
// lowest-index one is rethrown after all workers finish.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    const std::size_t n_threads = workers < count ? workers : count;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace bqr
