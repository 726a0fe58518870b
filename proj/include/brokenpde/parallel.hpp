#pragma once

#include <cstddef>
#include <functional>

namespace brokenpde {

/// Caps the worker threads used by parallel_for (at least 1). Default: 1.
void set_max_threads(int n);
int max_threads();

/// Runs fn(k) for k in [0, n), split into contiguous chunks over up to
/// max_threads() threads. The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace brokenpde
