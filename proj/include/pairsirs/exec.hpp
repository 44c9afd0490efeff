#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pairsirs {

/// Serial runs the plain reference loop; Parallel uses OpenMP when compiled
/// in (falls back to the same serial loop otherwise). Both orderings write
/// result slot i from input i only, so outputs are bitwise identical.
enum class ExecPolicy { Serial, Parallel };

inline bool parallelism_compiled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class Body>
void parallel_for(ExecPolicy policy, std::ptrdiff_t count, Body&& body) {
    if (policy == ExecPolicy::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
        return;
#endif
    }
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
}

} // namespace pairsirs
