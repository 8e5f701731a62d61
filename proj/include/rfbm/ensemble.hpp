#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace rfbm {

enum class Execution { Serial, Parallel };

/// Worker count for parallel maps: set_worker_count() if called, else the
/// RFBM_WORKERS environment variable, else the OpenMP default.
int worker_count();
void set_worker_count(int n);

/// results[i] = fn(i). Each index owns its RNG stream, so the output is the
/// same for every worker count; callers reduce it in index order.
template <class R, class F>
std::vector<R> map_paths_serial(std::size_t n, F&& fn) {
  std::vector<R> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
  return out;
}

template <class R, class F>
std::vector<R> map_paths_parallel(std::size_t n, F&& fn) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(worker_count())
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

template <class R, class F>
std::vector<R> map_paths(std::size_t n, F&& fn, Execution ex = Execution::Parallel) {
  if (ex == Execution::Serial) return map_paths_serial<R>(n, fn);
  return map_paths_parallel<R>(n, fn);
}

}  // namespace rfbm
