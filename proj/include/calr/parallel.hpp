#pragma once

#include <cstddef>
#include <functional>

namespace calr {

/// Worker count: CALR_THREADS if set (>= 1), else hardware concurrency.
unsigned thread_count();

/// Runs fn(i) for i in [0, n); each index is processed exactly once.
/// The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace calr
