#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace holodepth {

/// Forces every parallel region to run on the calling thread.
void set_sequential(bool enabled);
bool sequential_mode();

/// Fixed worker count for parallel regions; 0 restores the default.
void set_thread_count(unsigned count);

/// Worker count for parallel regions: 1 in sequential mode, else the value
/// from set_thread_count, else hardware concurrency capped by the
/// HOLODEPTH_THREADS environment variable.
unsigned worker_count();

/// Runs body(i) for i in [begin, end). Iterations are split into contiguous
/// chunks, one per worker. Nested calls from a worker run inline. The first
/// exception thrown by any iteration is rethrown on the calling thread.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace holodepth
