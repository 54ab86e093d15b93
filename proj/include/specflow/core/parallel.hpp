#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>

namespace specflow {

/// Size of the worker pool used by every parallel kernel. 0 restores the default
/// (one worker per logical core).
void set_worker_count(int n);
int worker_count();

/// Runs body(i) for i < n on the worker pool; the first exception is rethrown
/// after the loop. Each index writes only its own outputs, so results do not
/// depend on the pool size.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(specflow_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace specflow
