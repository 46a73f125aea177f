#pragma once

#include <cstddef>
#include <functional>

namespace evac {

// Runs fn(0..n-1) on up to `jobs` threads (jobs <= 1 runs inline, in order).
// The exception from the lowest failing index is rethrown after all workers finish.
void parallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace evac
