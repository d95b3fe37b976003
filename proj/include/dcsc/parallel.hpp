#pragma once
// Thread-cap control and the parallel-for helper behind every data-parallel
// kernel. A cap of 1 forces plain serial loops, which is what the
// bit-determinism contract of the CLI relies on.

#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dcsc::par {

// n <= 0 resets to the hardware default
void set_max_threads(int n);
int max_threads();

inline bool in_parallel() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

// Runs body(i) for i in [0, n). Parallel when the cap allows it and we are
// not already inside a parallel region; nested data-parallelism stays serial.
template <typename F>
void parallel_for(std::int64_t n, F&& body) {
#ifdef _OPENMP
  const int threads = max_threads();
  if (threads > 1 && n > 1 && !in_parallel()) {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Loops touching fewer scalars than this run serially: thread start-up costs
// more than the work itself on small grids.
inline constexpr std::int64_t kForkThreshold = 1 << 14;

template <typename F>
void parallel_for_grain(std::int64_t n, std::int64_t work_per_item, F&& body) {
  if (n * work_per_item >= kForkThreshold) {
    parallel_for(n, std::forward<F>(body));
  } else {
    for (std::int64_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace dcsc::par
