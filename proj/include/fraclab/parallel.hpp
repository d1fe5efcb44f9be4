#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fraclab {

/// Process-wide default worker count (the CLI's --threads).
void set_default_threads(int n);
int default_threads();

namespace detail {
/// True on threads that already run inside a parallel region; nested calls
/// then run serially.
bool& in_parallel_region();
}

/// Runs fn(i) for i in [0, n) over contiguous chunks. Each index is handled by
/// exactly one thread, so results written per index do not depend on the
/// thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = default_threads()) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
  if (workers <= 1 || detail::in_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_parallel_region() = true;
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fraclab
