#pragma once

#include <cstddef>
#include <functional>

namespace freqcomb {

// Worker count: hardware concurrency, capped by FREQCOMB_THREADS when set.
std::size_t thread_count();

// Runs body(i) for i in [0, n) over contiguous chunks. Each index is visited
// exactly once; body must only write to per-index state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace freqcomb
