#pragma once

#include <cstddef>
#include <functional>

namespace metaspec {

/// Worker count: METASPEC_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n) across up to worker_count() threads.
/// Iterations must be independent; the first exception thrown is rethrown.
/// Calls made from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace metaspec
