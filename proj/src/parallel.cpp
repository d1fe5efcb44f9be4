#include "fraclab/parallel.hpp"

#include <atomic>

namespace fraclab {

namespace {
std::atomic<int> g_threads{1};
}

void set_default_threads(int n) { g_threads.store(std::max(1, n)); }
int default_threads() { return g_threads.load(); }

bool& detail::in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}

}  // namespace fraclab
