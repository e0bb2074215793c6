#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kbregex {

// Run fn(i) for i in [0, n). Each index owns its output slot, so results are
// identical for any worker count; workers <= 1 runs the plain serial loop.
template <class F>
void parallel_for(size_t n, int workers, F&& fn) {
#ifdef _OPENMP
    if (workers > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<size_t>(i));
        }
        return;
    }
#else
    (void)workers;
#endif
    for (size_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace kbregex
