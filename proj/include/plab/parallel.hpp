#pragma once
// Index-deterministic fan-out for Monte Carlo drivers. Results must be stored
// by index so output is independent of scheduling; aggregation happens after.
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace plab {

// Worker count: PERTURBED_LAB_THREADS if set and positive, else hardware.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("PERTURBED_LAB_THREADS")) {
    char* end = nullptr;
    const long k = std::strtol(env, &end, 10);
    if (end && *end == '\0' && k > 0) return static_cast<std::size_t>(k);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs body(i) for i in [0, count) split in contiguous blocks across workers.
// body must only write to slots owned by its own index.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count > 0 ? count : std::size_t{1});
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  const std::size_t block = (count + workers - 1) / workers;
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(count, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body, &first_error, &failed] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace plab
