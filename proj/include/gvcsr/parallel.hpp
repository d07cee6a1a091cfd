#pragma once

#include <cstddef>
#include <functional>

namespace gvcsr {

// Worker cap: min(hardware threads, GVCSR_THREADS env if set). Always >= 1.
std::size_t worker_count();

// Runs fn(i) for i in [0, n), split into contiguous chunks across workers.
// Deterministic as long as iterations write disjoint state. Falls back to a
// plain loop when n is small or only one worker is available.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gvcsr
