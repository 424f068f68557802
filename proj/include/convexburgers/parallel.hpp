#pragma once

#include <cstddef>
#include <functional>

namespace convexburgers {

/// Upper bound on worker threads used by data-parallel loops (>= 1).
/// Initialized from the SOLVER_THREADS environment variable, default 1.
std::size_t max_threads();
void set_max_threads(std::size_t count);

/// Splits [0, count) into contiguous chunks and runs body(begin, end) on each,
/// one thread per chunk. Chunk boundaries depend only on count and the
/// thread cap, never on timing.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace convexburgers
