#include "wsub/parallel.hpp"

#include <omp.h>

namespace wsub {

int workerCount(const ExecOptions& opts) {
  if (opts.exec == Exec::Serial) return 1;
  if (opts.threads > 0) return opts.threads;
  return omp_get_max_threads();
}

}  // namespace wsub
