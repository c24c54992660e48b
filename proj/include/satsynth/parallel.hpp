#pragma once

#include <cstddef>
#include <functional>

namespace satsynth {

/// Worker count from SATSYNTH_WORKERS, falling back to hardware concurrency.
int default_worker_count();

/// Calls fn(i) for i in [0, count) on up to `threads` threads. Items are
/// claimed dynamically; callers must make fn(i) independent of scheduling.
/// The first exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace satsynth
