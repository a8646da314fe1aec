#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mp {

inline int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

/// Static-schedule parallel loop over [0, n). Bodies must write disjoint
/// locations; results are then independent of the thread count.
template <class F>
void parallel_for(std::int64_t n, int threads, F&& body) {
#ifdef _OPENMP
  if (threads != 1) {
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace mp
