#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace indist {

/// Apply the INDIST_THREADS cap (if set) to the OpenMP runtime. Called once
/// by executables; safe no-op when built without OpenMP.
inline void apply_thread_cap_from_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("INDIST_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace indist
