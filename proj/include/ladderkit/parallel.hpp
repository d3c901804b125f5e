#pragma once

#include <cstddef>
#include <functional>

namespace ladderkit {

// Worker count from LADDERKIT_WORKERS, else the hardware concurrency (min 1).
std::size_t default_workers();

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// processed exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t workers = default_workers());

}  // namespace ladderkit
