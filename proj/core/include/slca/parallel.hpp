#pragma once

#include <cstddef>
#include <functional>

namespace slca {

/// Worker cap: SLCA_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n), split over up to worker_count() threads.
/// fn must only write state owned by index i. The first exception thrown by
/// any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace slca
