#include "dcsc/parallel.hpp"

#include <atomic>

namespace dcsc::par {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = hardware default
}

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0); }

int max_threads() {
  const int cap = g_max_threads.load();
#ifdef _OPENMP
  const int hw = omp_get_max_threads();
#else
  const int hw = 1;
#endif
  if (cap <= 0) return hw;
  return cap < hw ? cap : hw;
}

}  // namespace dcsc::par
