#pragma once

#include <cstddef>
#include <functional>

namespace cbamp {

/// Worker count: requested > 0 wins; otherwise hardware concurrency capped by
/// the CBAMP_THREADS environment variable (0 or unset = auto).
int resolve_threads(int requested);

/// Runs fn(0..count-1) on up to `threads` workers. Each index must write only
/// its own output slot; results are then independent of the worker count.
/// Exceptions from fn are captured and rethrown on the calling thread.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace cbamp
