#pragma once

#include <cstddef>
#include <functional>

namespace sdelab {

// Number of workers: explicit argument wins, then the SDELAB_WORKERS
// environment variable, then hardware concurrency.
int resolve_workers(int requested = 0);

// Runs fn(i) for i in [0, count) split into fixed-size blocks handed to a
// thread pool. Block boundaries are independent of the worker count, so any
// reduction that first fills per-index slots and then folds them in index
// order is bit-reproducible regardless of parallelism.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn,
                  int workers = 0);

}  // namespace sdelab
