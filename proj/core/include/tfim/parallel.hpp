#pragma once

#include <cstddef>
#include <functional>

namespace tfim {

/// Worker count resolution: ECHO_THREADS env var caps parallelism
/// (0 or unset = hardware concurrency), and never exceeds `count`.
unsigned effective_thread_count(std::size_t count);

/// Runs fn(begin, end) over contiguous index chunks on worker threads.
/// Callers write results into disjoint preallocated slots, so output is
/// bitwise independent of the worker count. Exceptions from workers are
/// rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace tfim
