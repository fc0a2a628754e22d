#pragma once

#include <cstddef>
#include <functional>

namespace netident {

/// Worker count: NETIDENT_THREADS when set and positive, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = thread_count()).
/// Rethrows the exception of the lowest failing index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace netident
