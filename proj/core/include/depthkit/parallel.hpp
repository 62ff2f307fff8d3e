#pragma once

#include <cstddef>
#include <functional>

namespace depthkit::par {

/// Worker count: DEPTHKIT_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(0) .. fn(n-1) across workers.  Each index must write only its own
/// output slot; results are then independent of scheduling, which keeps
/// replicated studies byte-identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace depthkit::par
