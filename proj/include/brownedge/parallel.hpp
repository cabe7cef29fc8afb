#pragma once

#include <cstddef>
#include <functional>

namespace brownedge {

// Worker count: BROWNEDGE_THREADS if set (>= 1), otherwise the hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace brownedge
