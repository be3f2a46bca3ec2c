#pragma once

#include <cstddef>
#include <functional>

namespace sigcausal {

/// Worker count: hardware concurrency, capped by SIGCAUSAL_THREADS when set.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Work items
/// must be independent; the first exception thrown is rethrown. Calls made
/// from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sigcausal
