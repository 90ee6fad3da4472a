#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace wbary {

// Worker count for data-parallel loops. Results never depend on it: every
// parallel loop writes disjoint slots and reductions run serially afterwards.
void set_num_threads(int n);
int num_threads();

template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
  const int threads = num_threads();
  if (threads <= 1 || n <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
#ifdef WBARY_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace wbary
