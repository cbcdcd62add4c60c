#pragma once

#include <cstddef>
#include <functional>

namespace pipefair {

// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnvVar = "PIPEFAIR_THREADS";

// PIPEFAIR_THREADS if set to a positive integer, else hardware concurrency
// (at least 1).
std::size_t default_thread_count();

// Calls fn(i) for every i in [0, n), split into contiguous chunks over
// `threads` workers. fn must only write to state owned by index i. The first
// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace pipefair
