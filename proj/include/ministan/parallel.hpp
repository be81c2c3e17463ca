#pragma once

#include <cstddef>
#include <exception>

namespace ministan {

/// Serial execution is the reference; parallel execution must produce
/// bit-identical results (every kernel uses per-index RNG streams and
/// reduces in index order).
enum class Execution { serial, parallel };

/// Runs fn(i) for i in [0, n). An exception thrown by any iteration is
/// rethrown after the loop; when several iterations throw, the one with the
/// lowest index wins so the error is independent of scheduling.
template <class Fn>
void for_each_index(Execution exec, std::size_t n, Fn&& fn) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::size_t error_index = n;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(ministan_for_each_index)
      {
        if (static_cast<std::size_t>(i) < error_index) {
          error_index = static_cast<std::size_t>(i);
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

int max_threads();

}  // namespace ministan
