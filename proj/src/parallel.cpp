#include "dftrap/parallel.hpp"

#include <atomic>

#include <omp.h>

namespace dftrap {

namespace {
std::atomic<int> g_workers{0};
}

void set_worker_count(int workers) { g_workers = workers > 0 ? workers : 0; }

int worker_count() {
  const int w = g_workers.load();
  return w > 0 ? w : omp_get_max_threads();
}

}  // namespace dftrap
