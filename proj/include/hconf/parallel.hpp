#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#if defined(_OPENMP)
#include <omp.h>
#endif

namespace hconf {

inline int max_threads() {
#if defined(_OPENMP)
  return ::omp_get_max_threads();
#else
  return 1;
#endif
}

inline bool in_parallel() {
#if defined(_OPENMP)
  return ::omp_in_parallel();
#else
  return false;
#endif
}

/// Runs f(0) .. f(n-1), across OpenMP threads when `parallel` is set and we
/// are not already inside a parallel region. Iterations must write disjoint
/// state. The first exception thrown by any iteration is rethrown.
template <class F>
void parallel_for(std::size_t n, bool parallel, F&& f) {
#if defined(_OPENMP)
  if (parallel && n > 1 && !in_parallel()) {
    std::exception_ptr error;
    std::mutex m;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        f(static_cast<std::size_t>(i));
      } catch (...) {
        std::lock_guard lock(m);
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace hconf
