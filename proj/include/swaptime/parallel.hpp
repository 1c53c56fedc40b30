#pragma once

#include <cstddef>
#include <functional>

namespace swaptime {

// Number of worker threads: the WORKERS environment variable when set to a
// positive integer, otherwise the hardware concurrency (at least 1).
int worker_count();

// Runs fn(i) for i in [0, n) across worker_count() threads.  Which thread
// handles which item is unspecified, so fn must write its result to a slot
// keyed by i; the gathered output is then independent of the worker count.
// The first exception thrown by fn is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace swaptime
