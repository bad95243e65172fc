#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nli {

struct Execution {
  /// Worker threads; results never depend on this value.
  unsigned threads = 1;
};

inline std::size_t worker_count(std::size_t n, unsigned threads) {
  return std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1));
}

/// Runs body(worker, i) for i in [0, n). Worker w owns a contiguous block of
/// items, so per-worker state indexed by `worker` needs no locking. The
/// exception of the lowest failing worker is rethrown.
template <class Body>
void parallel_for_workers(std::size_t n, unsigned threads, Body&& body) {
  const std::size_t workers = worker_count(n, threads);
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    try {
      for (std::size_t i = begin; i < end; ++i) body(w, i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  parallel_for_workers(n, threads, [&](std::size_t, std::size_t i) { body(i); });
}

}  // namespace nli
