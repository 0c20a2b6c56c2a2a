#pragma once

#include <cstddef>
#include <functional>

namespace ppm {

/// Worker count: PPM_LAB_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
unsigned worker_count();

/// Runs body(worker, index) for index in [0, count) on up to `workers`
/// threads (0 means worker_count()). Indices are handed out in contiguous
/// blocks; body must only write to per-index or per-worker state.
void parallel_for(std::size_t count, std::function<void(unsigned, std::size_t)> const &body,
                  unsigned workers = 0);

}  // namespace ppm
