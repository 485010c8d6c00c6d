#pragma once

#include <cstddef>

namespace wsub {

enum class Exec { Serial, Parallel };

struct ExecOptions {
  Exec exec = Exec::Parallel;
  int threads = 0;  // 0: runtime default
};

/// Number of worker threads a Parallel run would use.
int workerCount(const ExecOptions& opts);

/// Runs fn(i) for i in [0, n). The serial path is the reference used in
/// tests; the parallel path splits the range across OpenMP threads.
template <class F>
void forEachIndex(std::size_t n, const ExecOptions& opts, F&& fn) {
  if (opts.exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const long long count = static_cast<long long>(n);
  const int threads = workerCount(opts);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long long i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace wsub
