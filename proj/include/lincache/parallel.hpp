#pragma once

#include <cstddef>
#include <functional>

namespace lincache {

// Worker count: hardware concurrency, capped by the LCC_THREADS environment
// variable when it holds a positive integer.
std::size_t thread_count();

// Runs fn(i) for i in [0, n) on up to thread_count() threads.  fn must only
// write to per-index state.  The first exception thrown by any call is
// rethrown on the calling thread after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace lincache
