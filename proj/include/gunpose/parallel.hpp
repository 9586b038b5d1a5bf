// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gunpose {

// Threads used when `workers` is 0.
inline int default_workers() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(i) for i in [0, n) on up to `workers` OpenMP threads (0 = runtime
// default). Iterations must write disjoint outputs. The first exception thrown
// by any iteration is rethrown on the calling thread after the loop.
template <typename Body>
void parallel_for(std::ptrdiff_t n, int workers, Body&& body) {
  std::exception_ptr error;
  std::once_flag once;
  const int threads = workers > 0 ? workers : default_workers();
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1 && n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::call_once(once, [&] { error = std::current_exception(); });
    }
  }
  (void)threads;
  if (error) std::rethrow_exception(error);
}

}  // namespace gunpose
